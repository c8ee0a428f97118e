#include "convarith/engine.hpp"

#include <algorithm>
#include <sstream>

#include "convarith/errors.hpp"

namespace convarith {

namespace {

std::vector<std::int64_t> splat(std::int64_t value, std::int64_t count) {
    return std::vector<std::int64_t>(static_cast<std::size_t>(count), value);
}

void check_param_count(std::span<const std::int64_t> values, std::int64_t expected,
                       const char* what) {
    if (static_cast<std::int64_t>(values.size()) != expected) {
        std::ostringstream msg;
        msg << what << " needs one value per spatial axis: got " << values.size()
            << ", expected " << expected;
        throw ShapeMismatch(msg.str());
    }
}

std::vector<std::int64_t> concat(std::int64_t head, std::span<const std::int64_t> tail) {
    std::vector<std::int64_t> joined;
    joined.reserve(tail.size() + 1);
    joined.push_back(head);
    joined.insert(joined.end(), tail.begin(), tail.end());
    return joined;
}

// Channel-swapped, spatially reversed copy of a kernel stack: entry
// (om, im, k) moves to (im, om, k_max - k). This is the kernel of the
// adjoint map when the forward pass is cross-correlation.
KernelStack swap_and_reverse(const KernelStack& kernels) {
    const Tensor& w = kernels.weights();
    const std::vector<std::int64_t> spatial = kernels.spatial_shape();
    std::vector<std::int64_t> out_shape = w.shape();
    std::swap(out_shape[0], out_shape[1]);
    const Tensor layout(out_shape);
    std::vector<double> out(static_cast<std::size_t>(w.size()), 0.0);
    std::vector<std::int64_t> idx(w.shape().size(), 0);
    std::vector<std::int64_t> target(idx.size(), 0);
    std::int64_t flat = 0;
    do {
        target[0] = idx[1];
        target[1] = idx[0];
        for (std::size_t a = 2; a < idx.size(); ++a) {
            target[a] = spatial[a - 2] - 1 - idx[a];
        }
        out[static_cast<std::size_t>(layout.linear_index(target))] =
            w.data()[static_cast<std::size_t>(flat++)];
    } while (next_index(idx, w.shape()));
    return KernelStack(Tensor(std::move(out_shape), std::move(out)));
}

// Core loop over a channelled input (in_maps, spatial...).
Tensor conv_channelled(const Tensor& input, const KernelStack& kernels,
                       std::span<const std::int64_t> stride,
                       std::span<const std::int64_t> padding,
                       std::span<const std::int64_t> dilation) {
    const std::int64_t spatial_rank = kernels.spatial_rank();
    const std::vector<std::int64_t> kernel_shape = kernels.spatial_shape();
    if (input.shape()[0] != kernels.in_maps()) {
        std::ostringstream msg;
        msg << "input has " << input.shape()[0] << " feature maps but the kernel stack expects "
            << kernels.in_maps();
        throw ShapeMismatch(msg.str());
    }

    std::vector<AxisSpec> axes(static_cast<std::size_t>(spatial_rank));
    for (std::int64_t a = 0; a < spatial_rank; ++a) {
        axes[a] = AxisSpec{input.shape()[a + 1], kernel_shape[a], stride[a], padding[a],
                           dilation[a]};
    }
    const std::vector<std::int64_t> out_spatial = conv_output_shape(axes);

    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(kernels.out_maps()));
    std::vector<std::int64_t> out_idx(out_spatial.size(), 0);
    std::vector<std::int64_t> kernel_idx(kernel_shape.size(), 0);
    std::vector<std::int64_t> in_pos(input.shape().size(), 0);
    std::vector<std::int64_t> w_pos(kernel_shape.size() + 2, 0);

    for (std::int64_t om = 0; om < kernels.out_maps(); ++om) {
        std::fill(out_idx.begin(), out_idx.end(), 0);
        do {
            double acc = 0.0;
            for (std::int64_t im = 0; im < kernels.in_maps(); ++im) {
                std::fill(kernel_idx.begin(), kernel_idx.end(), 0);
                do {
                    bool inside = true;
                    for (std::int64_t a = 0; a < spatial_rank; ++a) {
                        const std::int64_t pos =
                            out_idx[a] * stride[a] + kernel_idx[a] * dilation[a] - padding[a];
                        if (pos < 0 || pos >= input.shape()[a + 1]) {
                            inside = false;
                            break;
                        }
                        in_pos[a + 1] = pos;
                    }
                    if (!inside) continue; // the tap falls on zero padding
                    in_pos[0] = im;
                    w_pos[0] = om;
                    w_pos[1] = im;
                    std::copy(kernel_idx.begin(), kernel_idx.end(), w_pos.begin() + 2);
                    acc += input.at(in_pos) * kernels.weights().at(w_pos);
                } while (next_index(kernel_idx, kernel_shape));
            }
            out.push_back(acc);
        } while (next_index(out_idx, out_spatial));
    }
    return Tensor(concat(kernels.out_maps(), out_spatial), std::move(out));
}

Tensor conv_transposed_channelled(const Tensor& input, const KernelStack& kernels,
                                  std::span<const std::int64_t> stride,
                                  std::span<const std::int64_t> padding,
                                  std::span<const std::int64_t> residue) {
    const std::int64_t spatial_rank = kernels.spatial_rank();
    const std::vector<std::int64_t> kernel_shape = kernels.spatial_shape();
    if (input.shape()[0] != kernels.out_maps()) {
        std::ostringstream msg;
        msg << "transposed input has " << input.shape()[0]
            << " feature maps but the kernel stack produces " << kernels.out_maps();
        throw ShapeMismatch(msg.str());
    }

    // Validates p <= k - 1, the residue range, and a non-empty output.
    std::vector<std::int64_t> stretch_factors{1};
    std::vector<std::int64_t> pad_begin{0};
    std::vector<std::int64_t> pad_end{0};
    for (std::int64_t a = 0; a < spatial_rank; ++a) {
        const TransposedPlan plan = transposed_plan(kernel_shape[a], stride[a], padding[a],
                                                    input.shape()[a + 1], residue[a]);
        stretch_factors.push_back(stride[a]);
        pad_begin.push_back(plan.padding);
        pad_end.push_back(plan.padding + plan.residue);
    }

    const Tensor prepared = pad(stretch(input, stretch_factors), pad_begin, pad_end);
    const std::vector<std::int64_t> ones = splat(1, spatial_rank);
    const std::vector<std::int64_t> zeros = splat(0, spatial_rank);
    return conv_channelled(prepared, swap_and_reverse(kernels), ones, zeros, ones);
}

Tensor add_channel_axis(const Tensor& spatial) {
    return reshape(flatten(spatial), concat(1, spatial.shape()));
}

Tensor drop_channel_axis(const Tensor& channelled) {
    std::vector<std::int64_t> spatial(channelled.shape().begin() + 1, channelled.shape().end());
    return reshape(flatten(channelled), std::move(spatial));
}

} // namespace

KernelStack::KernelStack(Tensor weights) : weights_(std::move(weights)) {
    if (weights_.rank() < 3) {
        std::ostringstream msg;
        msg << "a kernel stack is laid out (out_maps, in_maps, spatial...) and needs rank >= 3, "
               "got rank "
            << weights_.rank();
        throw ShapeMismatch(msg.str());
    }
}

KernelStack KernelStack::from_single(Tensor spatial_kernel) {
    std::vector<std::int64_t> shape{1, 1};
    shape.insert(shape.end(), spatial_kernel.shape().begin(), spatial_kernel.shape().end());
    return KernelStack(reshape(flatten(spatial_kernel), std::move(shape)));
}

std::vector<std::int64_t> KernelStack::spatial_shape() const {
    return std::vector<std::int64_t>(weights_.shape().begin() + 2, weights_.shape().end());
}

Tensor conv(const Tensor& input, const KernelStack& kernels,
            std::span<const std::int64_t> stride, std::span<const std::int64_t> padding,
            std::span<const std::int64_t> dilation) {
    const std::int64_t spatial_rank = kernels.spatial_rank();
    check_param_count(stride, spatial_rank, "stride");
    check_param_count(padding, spatial_rank, "padding");
    check_param_count(dilation, spatial_rank, "dilation");
    if (input.rank() == spatial_rank + 1) {
        return conv_channelled(input, kernels, stride, padding, dilation);
    }
    if (input.rank() == spatial_rank && kernels.in_maps() == 1 && kernels.out_maps() == 1) {
        return drop_channel_axis(
            conv_channelled(add_channel_axis(input), kernels, stride, padding, dilation));
    }
    std::ostringstream msg;
    msg << "input rank " << input.rank() << " does not match a kernel stack with "
        << spatial_rank << " spatial axes";
    throw ShapeMismatch(msg.str());
}

Tensor conv(const Tensor& input, const KernelStack& kernels, std::int64_t stride,
            std::int64_t padding, std::int64_t dilation) {
    const std::int64_t n = kernels.spatial_rank();
    return conv(input, kernels, splat(stride, n), splat(padding, n), splat(dilation, n));
}

Tensor pool(const Tensor& input, PoolKind kind, std::span<const std::int64_t> window,
            std::span<const std::int64_t> stride) {
    if (static_cast<std::int64_t>(window.size()) != input.rank() ||
        static_cast<std::int64_t>(stride.size()) != input.rank()) {
        throw ShapeMismatch("pooling window and stride need one value per input axis");
    }
    std::vector<std::int64_t> out_shape(input.shape().size(), 0);
    for (std::size_t a = 0; a < out_shape.size(); ++a) {
        out_shape[a] = pool_output_size(input.shape()[a], window[a], stride[a]);
    }
    std::int64_t window_count = 1;
    for (std::int64_t extent : window) window_count *= extent;

    std::vector<double> out;
    std::vector<std::int64_t> out_idx(out_shape.size(), 0);
    std::vector<std::int64_t> win_idx(out_shape.size(), 0);
    std::vector<std::int64_t> in_pos(out_shape.size(), 0);
    const std::vector<std::int64_t> window_shape(window.begin(), window.end());
    do {
        bool first = true;
        double value = 0.0;
        std::fill(win_idx.begin(), win_idx.end(), 0);
        do {
            for (std::size_t a = 0; a < in_pos.size(); ++a) {
                in_pos[a] = out_idx[a] * stride[a] + win_idx[a];
            }
            const double sample = input.at(in_pos);
            if (kind == PoolKind::kMax) {
                value = first ? sample : std::max(value, sample);
            } else {
                value += sample;
            }
            first = false;
        } while (next_index(win_idx, window_shape));
        out.push_back(kind == PoolKind::kMax ? value
                                             : value / static_cast<double>(window_count));
    } while (next_index(out_idx, out_shape));
    return Tensor(std::move(out_shape), std::move(out));
}

Tensor pool(const Tensor& input, PoolKind kind, std::int64_t window, std::int64_t stride) {
    return pool(input, kind, splat(window, input.rank()), splat(stride, input.rank()));
}

Tensor conv_transposed(const Tensor& input, const KernelStack& kernels,
                       std::span<const std::int64_t> stride,
                       std::span<const std::int64_t> padding,
                       std::span<const std::int64_t> residue) {
    const std::int64_t spatial_rank = kernels.spatial_rank();
    check_param_count(stride, spatial_rank, "stride");
    check_param_count(padding, spatial_rank, "padding");
    check_param_count(residue, spatial_rank, "residue");
    if (input.rank() == spatial_rank + 1) {
        return conv_transposed_channelled(input, kernels, stride, padding, residue);
    }
    if (input.rank() == spatial_rank && kernels.in_maps() == 1 && kernels.out_maps() == 1) {
        return drop_channel_axis(conv_transposed_channelled(add_channel_axis(input), kernels,
                                                            stride, padding, residue));
    }
    std::ostringstream msg;
    msg << "input rank " << input.rank() << " does not match a kernel stack with "
        << spatial_rank << " spatial axes";
    throw ShapeMismatch(msg.str());
}

Tensor conv_transposed(const Tensor& input, const KernelStack& kernels, std::int64_t stride,
                       std::int64_t padding, std::int64_t residue) {
    const std::int64_t n = kernels.spatial_rank();
    return conv_transposed(input, kernels, splat(stride, n), splat(padding, n),
                           splat(residue, n));
}

Tensor conv_unit_stride_then_subsample(const Tensor& input, const KernelStack& kernels,
                                       std::span<const std::int64_t> padding,
                                       std::span<const std::int64_t> stride,
                                       std::span<const std::int64_t> dilation) {
    const std::int64_t spatial_rank = kernels.spatial_rank();
    check_param_count(stride, spatial_rank, "stride");
    const std::vector<std::int64_t> ones = splat(1, spatial_rank);
    const Tensor unit = conv(input, kernels, ones, padding, dilation);
    std::vector<std::int64_t> sub(stride.begin(), stride.end());
    if (unit.rank() == spatial_rank + 1) sub.insert(sub.begin(), 1); // keep the channel axis
    return subsample(unit, sub);
}

Tensor conv_unit_stride_then_subsample(const Tensor& input, const KernelStack& kernels,
                                       std::int64_t padding, std::int64_t stride,
                                       std::int64_t dilation) {
    const std::int64_t n = kernels.spatial_rank();
    return conv_unit_stride_then_subsample(input, kernels, splat(padding, n), splat(stride, n),
                                           splat(dilation, n));
}

} // namespace convarith
