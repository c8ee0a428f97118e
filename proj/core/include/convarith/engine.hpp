#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "convarith/geometry.hpp"
#include "convarith/tensor.hpp"

namespace convarith {

/// The collection of kernels of a multi-channel convolution, laid out
/// (out_map, in_map, k_1, ..., k_N). Every (out, in) pair shares the same
/// spatial extent.
class KernelStack {
public:
    /// Wraps a tensor of rank N+2 interpreted as (out_maps, in_maps, spatial...).
    explicit KernelStack(Tensor weights);

    /// A single-map stack around a purely spatial kernel.
    static KernelStack from_single(Tensor spatial_kernel);

    std::int64_t out_maps() const { return weights_.shape()[0]; }
    std::int64_t in_maps() const { return weights_.shape()[1]; }
    std::int64_t spatial_rank() const { return weights_.rank() - 2; }
    std::vector<std::int64_t> spatial_shape() const;
    const Tensor& weights() const { return weights_; }

private:
    Tensor weights_;
};

enum class PoolKind { kMax, kAverage };

/// Multi-channel discrete convolution, computed as cross-correlation: the
/// kernel is not flipped, so the adjoint (transposed) path uses the
/// spatially reversed kernel. Input is either (in_maps, spatial...) or, for
/// a single-map stack, purely spatial; the output mirrors the input's form.
/// Accumulation order is fixed: input maps outer, kernel cells row-major.
Tensor conv(const Tensor& input, const KernelStack& kernels,
            std::span<const std::int64_t> stride, std::span<const std::int64_t> padding,
            std::span<const std::int64_t> dilation);
Tensor conv(const Tensor& input, const KernelStack& kernels, std::int64_t stride = 1,
            std::int64_t padding = 0, std::int64_t dilation = 1);

/// Slide a window across the input and take its max or mean. Pooling never
/// pads. All axes of the input are pooled; use a window of 1 on axes that
/// should pass through.
Tensor pool(const Tensor& input, PoolKind kind, std::span<const std::int64_t> window,
            std::span<const std::int64_t> stride);
Tensor pool(const Tensor& input, PoolKind kind, std::int64_t window, std::int64_t stride = 1);

/// Transposed convolution via its equivalent direct convolution: stretch the
/// input by the stride, pad with k-p-1 zeros (plus the residue on trailing
/// edges), and convolve at unit stride with the channel-swapped, spatially
/// reversed kernels. Input is (out_maps, spatial...) — the forward
/// convolution's output side — and the result is (in_maps, spatial...).
Tensor conv_transposed(const Tensor& input, const KernelStack& kernels,
                       std::span<const std::int64_t> stride,
                       std::span<const std::int64_t> padding,
                       std::span<const std::int64_t> residue);
Tensor conv_transposed(const Tensor& input, const KernelStack& kernels, std::int64_t stride = 1,
                       std::int64_t padding = 0, std::int64_t residue = 0);

/// Strides viewed as subsampling: convolve at unit stride, then keep one
/// output element in s. Equals conv(input, kernels, stride, padding) exactly.
Tensor conv_unit_stride_then_subsample(const Tensor& input, const KernelStack& kernels,
                                       std::span<const std::int64_t> padding,
                                       std::span<const std::int64_t> stride,
                                       std::span<const std::int64_t> dilation);
Tensor conv_unit_stride_then_subsample(const Tensor& input, const KernelStack& kernels,
                                       std::int64_t padding, std::int64_t stride,
                                       std::int64_t dilation = 1);

} // namespace convarith
