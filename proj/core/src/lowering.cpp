#include "convarith/lowering.hpp"

#include <algorithm>
#include <sstream>

#include "convarith/errors.hpp"

namespace convarith {

namespace {

std::int64_t checked_area(std::int64_t a, std::int64_t b, const char* what) {
    std::int64_t product = 0;
    if (__builtin_mul_overflow(a, b, &product)) {
        std::ostringstream msg;
        msg << what << " element count overflows: " << a << " * " << b;
        throw InvalidGeometry(msg.str());
    }
    return product;
}

} // namespace

ConvMatrix::ConvMatrix(std::int64_t rows, std::int64_t cols, std::vector<MatrixEntry> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows_ < 0 || cols_ < 0) {
        throw InvalidGeometry("matrix dimensions must be non-negative");
    }
    for (const MatrixEntry& e : entries_) {
        if (e.row < 0 || e.row >= rows_ || e.col < 0 || e.col >= cols_) {
            std::ostringstream msg;
            msg << "matrix entry (" << e.row << ", " << e.col << ") is outside a " << rows_
                << " x " << cols_ << " matrix";
            throw InvalidGeometry(msg.str());
        }
    }
    std::stable_sort(entries_.begin(), entries_.end(),
                     [](const MatrixEntry& a, const MatrixEntry& b) {
                         return a.row != b.row ? a.row < b.row : a.col < b.col;
                     });
}

std::vector<double> ConvMatrix::apply(std::span<const double> x) const {
    if (static_cast<std::int64_t>(x.size()) != cols_) {
        std::ostringstream msg;
        msg << "apply expects a vector of " << cols_ << " elements, got " << x.size();
        throw ShapeMismatch(msg.str());
    }
    std::vector<double> y(static_cast<std::size_t>(rows_), 0.0);
    for (const MatrixEntry& e : entries_) {
        y[static_cast<std::size_t>(e.row)] += e.value * x[static_cast<std::size_t>(e.col)];
    }
    return y;
}

std::vector<double> ConvMatrix::apply_transpose(std::span<const double> y) const {
    if (static_cast<std::int64_t>(y.size()) != rows_) {
        std::ostringstream msg;
        msg << "apply_transpose expects a vector of " << rows_ << " elements, got " << y.size();
        throw ShapeMismatch(msg.str());
    }
    std::vector<double> x(static_cast<std::size_t>(cols_), 0.0);
    for (const MatrixEntry& e : entries_) {
        x[static_cast<std::size_t>(e.col)] += e.value * y[static_cast<std::size_t>(e.row)];
    }
    return x;
}

std::vector<double> ConvMatrix::to_dense() const {
    const std::int64_t total = checked_area(rows_, cols_, "dense matrix");
    std::vector<double> dense(static_cast<std::size_t>(total), 0.0);
    for (const MatrixEntry& e : entries_) {
        dense[static_cast<std::size_t>(e.row * cols_ + e.col)] = e.value;
    }
    return dense;
}

ConvMatrix build_matrix(const Tensor& kernel, std::span<const AxisSpec> axes) {
    if (axes.size() != 2) {
        std::ostringstream msg;
        msg << "matrix lowering handles 2-D convolutions: got " << axes.size() << " axes";
        throw InvalidGeometry(msg.str());
    }
    if (kernel.rank() != 2) {
        std::ostringstream msg;
        msg << "matrix lowering needs a rank-2 kernel, got rank " << kernel.rank();
        throw ShapeMismatch(msg.str());
    }
    for (std::size_t a = 0; a < 2; ++a) {
        if (axes[a].dilation != 1) {
            throw InvalidGeometry("matrix lowering does not support dilation");
        }
        if (kernel.shape()[a] != axes[a].kernel_size) {
            std::ostringstream msg;
            msg << "kernel extent " << kernel.shape()[a] << " on axis " << a
                << " does not match the declared kernel size " << axes[a].kernel_size;
            throw ShapeMismatch(msg.str());
        }
    }

    const std::int64_t o0 = conv_output_size(axes[0]);
    const std::int64_t o1 = conv_output_size(axes[1]);
    const std::int64_t rows = checked_area(o0, o1, "output");
    const std::int64_t cols = checked_area(axes[0].input_size, axes[1].input_size, "input");

    std::vector<MatrixEntry> entries;
    entries.reserve(static_cast<std::size_t>(rows * kernel.size()));
    for (std::int64_t r0 = 0; r0 < o0; ++r0) {
        for (std::int64_t r1 = 0; r1 < o1; ++r1) {
            const std::int64_t row = r0 * o1 + r1;
            for (std::int64_t u0 = 0; u0 < axes[0].kernel_size; ++u0) {
                const std::int64_t pos0 = r0 * axes[0].stride + u0 - axes[0].padding;
                if (pos0 < 0 || pos0 >= axes[0].input_size) continue;
                for (std::int64_t u1 = 0; u1 < axes[1].kernel_size; ++u1) {
                    const std::int64_t pos1 = r1 * axes[1].stride + u1 - axes[1].padding;
                    if (pos1 < 0 || pos1 >= axes[1].input_size) continue;
                    entries.push_back(MatrixEntry{row, pos0 * axes[1].input_size + pos1,
                                                  kernel(u0, u1)});
                }
            }
        }
    }
    return ConvMatrix(rows, cols, std::move(entries));
}

std::string format_matrix_listing(const ConvMatrix& matrix) {
    std::ostringstream out;
    out << matrix.rows() << " " << matrix.cols() << " " << matrix.entries().size() << "\n";
    for (const MatrixEntry& e : matrix.entries()) {
        out << e.row << " " << e.col << " " << e.value << "\n";
    }
    return out.str();
}

} // namespace convarith
