#include "convarith/tensor.hpp"

#include <sstream>

#include "convarith/errors.hpp"

namespace convarith {

namespace {

std::int64_t element_count(const std::vector<std::int64_t>& shape);

std::vector<std::int64_t> row_major_strides(const std::vector<std::int64_t>& shape) {
    element_count(shape); // validates before any stride arithmetic
    std::vector<std::int64_t> strides(shape.size(), 1);
    for (std::size_t a = shape.size(); a-- > 1;) {
        strides[a - 1] = strides[a] * shape[a];
    }
    return strides;
}

std::int64_t element_count(const std::vector<std::int64_t>& shape) {
    if (shape.empty()) throw ShapeMismatch("tensor shape must have at least one axis");
    std::int64_t count = 1;
    for (std::int64_t extent : shape) {
        if (extent < 1) {
            std::ostringstream msg;
            msg << "tensor shape entries must be positive, got " << extent;
            throw ShapeMismatch(msg.str());
        }
        if (__builtin_mul_overflow(count, extent, &count)) {
            throw ShapeMismatch("tensor shape is too large to address");
        }
    }
    return count;
}

void check_axis_params(const Tensor& t, std::span<const std::int64_t> values, const char* what,
                       std::int64_t minimum) {
    if (static_cast<std::int64_t>(values.size()) != t.rank()) {
        std::ostringstream msg;
        msg << what << " needs one value per axis: got " << values.size() << " for a rank-"
            << t.rank() << " tensor";
        throw ShapeMismatch(msg.str());
    }
    for (std::int64_t v : values) {
        if (v < minimum) {
            std::ostringstream msg;
            msg << what << " values must be >= " << minimum << ", got " << v;
            throw ShapeMismatch(msg.str());
        }
    }
}

std::vector<std::int64_t> splat(std::int64_t value, std::int64_t rank) {
    return std::vector<std::int64_t>(static_cast<std::size_t>(rank), value);
}

// Shared placement rule of stretch and dilate_kernel: element j of an axis
// lands at j * factor, everything else is zero.
Tensor space_out(const Tensor& t, std::span<const std::int64_t> factors, const char* what) {
    check_axis_params(t, factors, what, 1);
    std::vector<std::int64_t> out_shape(t.shape());
    for (std::size_t a = 0; a < out_shape.size(); ++a) {
        out_shape[a] = out_shape[a] + (out_shape[a] - 1) * (factors[a] - 1);
    }
    std::vector<double> out(static_cast<std::size_t>(element_count(out_shape)), 0.0);
    const Tensor result_layout(out_shape); // for stride math on the output
    std::vector<std::int64_t> idx(t.shape().size(), 0);
    std::vector<std::int64_t> target(idx.size(), 0);
    std::int64_t flat = 0;
    do {
        for (std::size_t a = 0; a < idx.size(); ++a) target[a] = idx[a] * factors[a];
        out[static_cast<std::size_t>(result_layout.linear_index(target))] =
            t.data()[static_cast<std::size_t>(flat++)];
    } while (next_index(idx, t.shape()));
    return Tensor(std::move(out_shape), std::move(out));
}

} // namespace

Tensor::Tensor(std::vector<std::int64_t> shape)
    : shape_(std::move(shape)),
      strides_(row_major_strides(shape_)),
      data_(static_cast<std::size_t>(element_count(shape_)), 0.0) {}

Tensor::Tensor(std::vector<std::int64_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), strides_(row_major_strides(shape_)), data_(std::move(data)) {
    const std::int64_t expected = element_count(shape_);
    if (static_cast<std::int64_t>(data_.size()) != expected) {
        std::ostringstream msg;
        msg << "data length " << data_.size() << " does not match shape product " << expected;
        throw ShapeMismatch(msg.str());
    }
}

std::int64_t Tensor::linear_index(std::span<const std::int64_t> index) const {
    if (index.size() != shape_.size()) {
        std::ostringstream msg;
        msg << "index rank " << index.size() << " does not match tensor rank " << shape_.size();
        throw ShapeMismatch(msg.str());
    }
    std::int64_t flat = 0;
    for (std::size_t a = 0; a < shape_.size(); ++a) {
        if (index[a] < 0 || index[a] >= shape_[a]) {
            std::ostringstream msg;
            msg << "index " << index[a] << " out of range for axis " << a << " of extent "
                << shape_[a];
            throw ShapeMismatch(msg.str());
        }
        flat += index[a] * strides_[a];
    }
    return flat;
}

double Tensor::at(std::span<const std::int64_t> index) const {
    return data_[static_cast<std::size_t>(linear_index(index))];
}

double Tensor::at(std::initializer_list<std::int64_t> index) const {
    return at(std::span<const std::int64_t>(index.begin(), index.size()));
}

double Tensor::operator()(std::int64_t row, std::int64_t col) const {
    return at({row, col});
}

std::vector<double> flatten(const Tensor& t) {
    return std::vector<double>(t.data().begin(), t.data().end());
}

Tensor reshape(std::vector<double> data, std::vector<std::int64_t> shape) {
    return Tensor(std::move(shape), std::move(data));
}

Tensor pad(const Tensor& t, std::span<const std::int64_t> begin,
           std::span<const std::int64_t> end) {
    check_axis_params(t, begin, "pad begin", 0);
    check_axis_params(t, end, "pad end", 0);
    std::vector<std::int64_t> out_shape(t.shape());
    for (std::size_t a = 0; a < out_shape.size(); ++a) {
        out_shape[a] += begin[a] + end[a];
    }
    std::vector<double> out(static_cast<std::size_t>(element_count(out_shape)), 0.0);
    const Tensor result_layout(out_shape);
    std::vector<std::int64_t> idx(t.shape().size(), 0);
    std::vector<std::int64_t> target(idx.size(), 0);
    std::int64_t flat = 0;
    do {
        for (std::size_t a = 0; a < idx.size(); ++a) target[a] = idx[a] + begin[a];
        out[static_cast<std::size_t>(result_layout.linear_index(target))] =
            t.data()[static_cast<std::size_t>(flat++)];
    } while (next_index(idx, t.shape()));
    return Tensor(std::move(out_shape), std::move(out));
}

Tensor pad(const Tensor& t, std::int64_t begin, std::int64_t end) {
    return pad(t, splat(begin, t.rank()), splat(end, t.rank()));
}

Tensor stretch(const Tensor& t, std::span<const std::int64_t> factors) {
    return space_out(t, factors, "stretch");
}

Tensor stretch(const Tensor& t, std::int64_t factor) {
    return space_out(t, splat(factor, t.rank()), "stretch");
}

Tensor dilate_kernel(const Tensor& kernel, std::span<const std::int64_t> dilation) {
    return space_out(kernel, dilation, "dilate_kernel");
}

Tensor dilate_kernel(const Tensor& kernel, std::int64_t dilation) {
    return space_out(kernel, splat(dilation, kernel.rank()), "dilate_kernel");
}

Tensor subsample(const Tensor& t, std::span<const std::int64_t> strides) {
    check_axis_params(t, strides, "subsample", 1);
    std::vector<std::int64_t> out_shape(t.shape());
    for (std::size_t a = 0; a < out_shape.size(); ++a) {
        out_shape[a] = (out_shape[a] + strides[a] - 1) / strides[a]; // ceil(i/s)
    }
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(element_count(out_shape)));
    std::vector<std::int64_t> idx(out_shape.size(), 0);
    std::vector<std::int64_t> source(idx.size(), 0);
    do {
        for (std::size_t a = 0; a < idx.size(); ++a) source[a] = idx[a] * strides[a];
        out.push_back(t.at(source));
    } while (next_index(idx, out_shape));
    return Tensor(std::move(out_shape), std::move(out));
}

Tensor subsample(const Tensor& t, std::int64_t stride) {
    return subsample(t, splat(stride, t.rank()));
}

bool next_index(std::span<std::int64_t> index, std::span<const std::int64_t> shape) {
    for (std::size_t a = index.size(); a-- > 0;) {
        if (++index[a] < shape[a]) return true;
        index[a] = 0;
    }
    return false;
}

} // namespace convarith
