#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "convarith/geometry.hpp"
#include "convarith/tensor.hpp"

namespace convarith {

// One structural entry of a lowered convolution matrix. Entries are kept even
// when the kernel value happens to be zero: the sparsity pattern is decided by
// the geometry alone, so the pattern stays stable as weights change.
struct MatrixEntry {
    std::int64_t row = 0;
    std::int64_t col = 0;
    double value = 0.0;
};

// Sparse matrix C with rows = prod(output shape) and cols = prod(input shape)
// such that vec(conv(x, w)) = C vec(x) for a single-channel 2-D convolution.
// Entries are stored in coordinate form, sorted by (row, col).
class ConvMatrix {
public:
    ConvMatrix(std::int64_t rows, std::int64_t cols, std::vector<MatrixEntry> entries);

    std::int64_t rows() const { return rows_; }
    std::int64_t cols() const { return cols_; }
    const std::vector<MatrixEntry>& entries() const { return entries_; }

    // y = C x. x must have cols() elements.
    std::vector<double> apply(std::span<const double> x) const;

    // x = C^T y. y must have rows() elements. This is the transposed
    // convolution of the same geometry, acting on flattened tensors.
    std::vector<double> apply_transpose(std::span<const double> y) const;

    // Row-major dense copy, rows() x cols().
    std::vector<double> to_dense() const;

private:
    std::int64_t rows_;
    std::int64_t cols_;
    std::vector<MatrixEntry> entries_;
};

// Lowers a single-channel 2-D convolution to its matrix form. The kernel is a
// rank-2 tensor whose shape must match the kernel sizes in `axes`; exactly two
// axes are supported and dilation must be 1. Taps that fall on padding
// contribute no entry, which is why rows touching the border are shorter.
ConvMatrix build_matrix(const Tensor& kernel, std::span<const AxisSpec> axes);

// Plain-text listing: a "rows cols nnz" header line, then one "row col value"
// line per entry in (row, col) order.
std::string format_matrix_listing(const ConvMatrix& matrix);

} // namespace convarith
