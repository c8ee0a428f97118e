#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace convarith {

/// Dense N-D array of doubles with explicit shape, stored row-major
/// (rightmost axis fastest). Tensors are immutable values: every transform
/// returns a new tensor.
class Tensor {
public:
    /// Zero-filled tensor. Shape entries must be positive.
    explicit Tensor(std::vector<std::int64_t> shape);

    /// Tensor over existing row-major data; data.size() must equal the
    /// product of the shape.
    Tensor(std::vector<std::int64_t> shape, std::vector<double> data);

    std::int64_t rank() const { return static_cast<std::int64_t>(shape_.size()); }
    const std::vector<std::int64_t>& shape() const { return shape_; }
    std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }
    std::span<const double> data() const { return data_; }

    double at(std::span<const std::int64_t> index) const;
    double at(std::initializer_list<std::int64_t> index) const;
    /// 2-D convenience: element (r, c) is data[r * cols + c].
    double operator()(std::int64_t row, std::int64_t col) const;

    std::int64_t linear_index(std::span<const std::int64_t> index) const;

    friend bool operator==(const Tensor& a, const Tensor& b) {
        return a.shape_ == b.shape_ && a.data_ == b.data_;
    }

private:
    std::vector<std::int64_t> shape_;
    std::vector<std::int64_t> strides_;
    std::vector<double> data_;
};

/// Row-major linearization of the tensor's values.
std::vector<double> flatten(const Tensor& t);

/// Inverse of flatten: rebuild a tensor of the given shape from row-major
/// data. reshape(flatten(t), t.shape()) == t for every tensor.
Tensor reshape(std::vector<double> data, std::vector<std::int64_t> shape);

/// Concatenate `begin[a]` zeros before and `end[a]` zeros after axis a.
Tensor pad(const Tensor& t, std::span<const std::int64_t> begin,
           std::span<const std::int64_t> end);
Tensor pad(const Tensor& t, std::int64_t begin, std::int64_t end);

/// Insert factor-1 zeros between consecutive elements along each axis;
/// element j of an axis lands at index j * factor, the new axis length is
/// i + (i-1)(factor-1).
Tensor stretch(const Tensor& t, std::span<const std::int64_t> factors);
Tensor stretch(const Tensor& t, std::int64_t factor);

/// Inflate a kernel by dilation d: same placement rule as stretch, giving
/// the effective kernel of size k + (k-1)(d-1) per axis.
Tensor dilate_kernel(const Tensor& kernel, std::span<const std::int64_t> dilation);
Tensor dilate_kernel(const Tensor& kernel, std::int64_t dilation);

/// Keep indices 0, s, 2s, ... along each axis; the result has ceil(i/s)
/// elements per axis.
Tensor subsample(const Tensor& t, std::span<const std::int64_t> strides);
Tensor subsample(const Tensor& t, std::int64_t stride);

/// Advance a row-major multi-index over `shape`; returns false after the
/// last index wraps back to all zeros.
bool next_index(std::span<std::int64_t> index, std::span<const std::int64_t> shape);

} // namespace convarith
