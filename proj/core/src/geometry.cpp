#include "convarith/geometry.hpp"

#include <sstream>

#include "convarith/errors.hpp"

namespace convarith {

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    if (__builtin_add_overflow(a, b, &r)) {
        std::ostringstream msg;
        msg << "integer overflow computing " << a << " + " << b;
        throw InvalidGeometry(msg.str());
    }
    return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    if (__builtin_mul_overflow(a, b, &r)) {
        std::ostringstream msg;
        msg << "integer overflow computing " << a << " * " << b;
        throw InvalidGeometry(msg.str());
    }
    return r;
}

[[noreturn]] void fail(const std::string& msg) { throw InvalidGeometry(msg); }

} // namespace

void AxisSpec::validate() const {
    std::ostringstream msg;
    if (input_size < 1) {
        msg << "input size must be positive, got " << input_size;
        fail(msg.str());
    }
    if (kernel_size < 1) {
        msg << "kernel size must be positive, got " << kernel_size;
        fail(msg.str());
    }
    if (stride < 1) {
        msg << "stride must be positive, got " << stride;
        fail(msg.str());
    }
    if (padding < 0) {
        msg << "padding must be non-negative, got " << padding;
        fail(msg.str());
    }
    if (dilation < 1) {
        msg << "dilation must be positive, got " << dilation;
        fail(msg.str());
    }
}

void ConvSpec::validate() const {
    if (axes.empty()) fail("a convolution needs at least one axis");
    for (const AxisSpec& axis : axes) axis.validate();
    if (in_maps < 1) fail("input feature map count must be positive");
    if (out_maps < 1) fail("output feature map count must be positive");
}

std::int64_t effective_kernel_size(std::int64_t kernel_size, std::int64_t dilation) {
    if (kernel_size < 1) fail("kernel size must be positive");
    if (dilation < 1) fail("dilation must be positive");
    // k + (k-1)(d-1)
    return checked_add(kernel_size, checked_mul(kernel_size - 1, dilation - 1));
}

std::int64_t conv_output_size(const AxisSpec& axis) {
    axis.validate();
    const std::int64_t effective = effective_kernel_size(axis.kernel_size, axis.dilation);
    const std::int64_t padded = checked_add(axis.input_size, checked_mul(2, axis.padding));
    if (padded < effective) {
        std::ostringstream msg;
        msg << "kernel cannot be placed even once: padded input " << padded
            << " is smaller than the effective kernel " << effective << " (i=" << axis.input_size
            << " k=" << axis.kernel_size << " p=" << axis.padding << " d=" << axis.dilation << ")";
        fail(msg.str());
    }
    return (padded - effective) / axis.stride + 1;
}

std::vector<std::int64_t> conv_output_shape(std::span<const AxisSpec> axes) {
    std::vector<std::int64_t> shape;
    shape.reserve(axes.size());
    for (const AxisSpec& axis : axes) shape.push_back(conv_output_size(axis));
    return shape;
}

std::int64_t pool_output_size(std::int64_t input_size, std::int64_t window, std::int64_t stride) {
    if (input_size < 1) fail("input size must be positive");
    if (window < 1) fail("pooling window must be positive");
    if (stride < 1) fail("stride must be positive");
    if (input_size < window) {
        std::ostringstream msg;
        msg << "pooling window " << window << " exceeds input size " << input_size;
        fail(msg.str());
    }
    return (input_size - window) / stride + 1;
}

std::int64_t half_padding(std::int64_t kernel_size) {
    if (kernel_size < 1) fail("kernel size must be positive");
    if (kernel_size % 2 == 0) {
        std::ostringstream msg;
        msg << "half padding is defined for odd kernel sizes only, got " << kernel_size;
        fail(msg.str());
    }
    return kernel_size / 2;
}

std::int64_t full_padding(std::int64_t kernel_size) {
    if (kernel_size < 1) fail("kernel size must be positive");
    return kernel_size - 1;
}

std::vector<std::int64_t> ambiguity_class(const AxisSpec& axis) {
    conv_output_size(axis); // validates and ensures the kernel fits at least once
    const std::int64_t numerator =
        checked_add(axis.input_size, checked_mul(2, axis.padding)) -
        effective_kernel_size(axis.kernel_size, axis.dilation);
    if (numerator % axis.stride != 0) {
        std::ostringstream msg;
        msg << "no ambiguity class: i + 2p - k = " << numerator
            << " is not a multiple of the stride " << axis.stride;
        fail(msg.str());
    }
    std::vector<std::int64_t> sizes;
    sizes.reserve(static_cast<std::size_t>(axis.stride));
    for (std::int64_t extra = 0; extra < axis.stride; ++extra) {
        sizes.push_back(checked_add(axis.input_size, extra));
    }
    return sizes;
}

namespace {

TransposedPlan make_plan(std::int64_t kernel_size, std::int64_t stride, std::int64_t padding,
                         std::int64_t transposed_input, std::int64_t residue) {
    if (kernel_size < 1) fail("kernel size must be positive");
    if (stride < 1) fail("stride must be positive");
    if (padding < 0) fail("padding must be non-negative");
    if (transposed_input < 1) fail("transposed-convolution input size must be positive");
    if (padding > kernel_size - 1) {
        std::ostringstream msg;
        msg << "transposed convolution requires p <= k - 1, got p=" << padding
            << " k=" << kernel_size;
        fail(msg.str());
    }
    if (residue < 0 || residue >= stride) {
        std::ostringstream msg;
        msg << "residue must lie in 0.." << (stride - 1) << ", got " << residue;
        fail(msg.str());
    }
    TransposedPlan plan{};
    plan.input_size = transposed_input;
    plan.stretched_size =
        checked_add(transposed_input, checked_mul(transposed_input - 1, stride - 1));
    plan.kernel_size = kernel_size;
    plan.stride = 1;
    plan.padding = kernel_size - padding - 1;
    plan.residue = residue;
    // o' = s(i'-1) + a + k - 2p
    plan.output_size = checked_add(checked_mul(stride, transposed_input - 1),
                                   residue + kernel_size - 2 * padding);
    if (plan.output_size < 1) {
        std::ostringstream msg;
        msg << "transposed convolution would produce an empty output (o'="
            << plan.output_size << ")";
        fail(msg.str());
    }
    return plan;
}

std::int64_t forward_residue(const AxisSpec& forward) {
    const std::int64_t numerator =
        checked_add(forward.input_size, checked_mul(2, forward.padding)) - forward.kernel_size;
    return numerator % forward.stride;
}

} // namespace

TransposedPlan transposed_plan(const AxisSpec& forward) {
    return transposed_plan(forward, conv_output_size(forward));
}

TransposedPlan transposed_plan(const AxisSpec& forward, std::int64_t transposed_input) {
    forward.validate();
    if (forward.dilation != 1) {
        fail("transposed convolution of a dilated convolution is not defined");
    }
    conv_output_size(forward); // ensures the forward spec itself is realizable
    return make_plan(forward.kernel_size, forward.stride, forward.padding, transposed_input,
                     forward_residue(forward));
}

TransposedPlan transposed_plan(std::int64_t kernel_size, std::int64_t stride,
                               std::int64_t padding, std::int64_t transposed_input,
                               std::int64_t residue) {
    return make_plan(kernel_size, stride, padding, transposed_input, residue);
}

} // namespace convarith
