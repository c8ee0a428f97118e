#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace convarith {

/// Per-axis hyperparameters of a convolutional layer. Output sizes never
/// interact across axes, so N-D shape inference maps the per-axis functions
/// over a list of these.
struct AxisSpec {
    std::int64_t input_size = 1;  // i
    std::int64_t kernel_size = 1; // k
    std::int64_t stride = 1;      // s
    std::int64_t padding = 0;     // p
    std::int64_t dilation = 1;    // d

    /// Throws InvalidGeometry unless i >= 1, k >= 1, s >= 1, d >= 1, p >= 0.
    void validate() const;
};

/// N-axis convolution description plus channel counts.
struct ConvSpec {
    std::vector<AxisSpec> axes;
    std::int64_t in_maps = 1;  // m
    std::int64_t out_maps = 1; // n

    void validate() const;
};

/// The equivalent direct convolution of a transposed convolution: a
/// unit-stride convolution over the stretched input (s-1 zeros between
/// units) padded with k-p-1 zeros, plus `residue` extra zeros on the
/// trailing edge.
struct TransposedPlan {
    std::int64_t input_size;     // i', size of the transposed-convolution input
    std::int64_t stretched_size; // i' + (i'-1)(s-1)
    std::int64_t kernel_size;    // unchanged from the forward kernel
    std::int64_t stride;         // always 1
    std::int64_t padding;        // k - p - 1
    std::int64_t residue;        // a, in 0..s-1
    std::int64_t output_size;    // s(i'-1) + a + k - 2p
};

/// Size of a kernel of size k dilated by factor d: k + (k-1)(d-1).
std::int64_t effective_kernel_size(std::int64_t kernel_size, std::int64_t dilation);

/// Output size o = floor((i + 2p - k - (k-1)(d-1)) / s) + 1.
/// Throws InvalidGeometry when the dilated kernel cannot be placed even once,
/// i.e. when i + 2p < k + (k-1)(d-1).
std::int64_t conv_output_size(const AxisSpec& axis);

/// Per-axis conv_output_size over a list of axes.
std::vector<std::int64_t> conv_output_shape(std::span<const AxisSpec> axes);

/// Pooling output size o = floor((i - k) / s) + 1; pooling never pads.
/// Throws InvalidGeometry when i < k.
std::int64_t pool_output_size(std::int64_t input_size, std::int64_t window, std::int64_t stride);

/// Padding that preserves the input size at unit stride: floor(k / 2).
/// Defined for odd k only; throws InvalidGeometry for even k.
std::int64_t half_padding(std::int64_t kernel_size);

/// Padding that counts every partial kernel overlap: k - 1. At unit stride
/// the output grows to i + (k - 1).
std::int64_t full_padding(std::int64_t kernel_size);

/// The s input sizes {i, i+1, ..., i+s-1} that share one output size when
/// i + 2p - k is a multiple of s. For s = 1 this is the singleton {i}.
std::vector<std::int64_t> ambiguity_class(const AxisSpec& axis);

/// Plan the transposed convolution of a forward spec. The transposed input
/// size defaults to the forward output size, and the residue
/// a = (i + 2p - k) mod s is determined by the forward input size.
/// Requires p <= k - 1 and d = 1.
TransposedPlan transposed_plan(const AxisSpec& forward);
TransposedPlan transposed_plan(const AxisSpec& forward, std::int64_t transposed_input);

/// Plan a transposed convolution without a forward input size; the residue
/// cannot be derived and must be supplied (default 0).
TransposedPlan transposed_plan(std::int64_t kernel_size, std::int64_t stride,
                               std::int64_t padding, std::int64_t transposed_input,
                               std::int64_t residue = 0);

} // namespace convarith
