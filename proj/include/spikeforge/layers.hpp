#pragma once

// Differentiable building blocks with hand-derived gradients: 1D convolution
// (stride 1, zero padding), Leaky ReLU, inverted dropout, a numerically
// stable sigmoid, and binary cross-entropy over two sigmoid outputs.
// Every backward here is checked against central finite differences in the
// test suite.

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "spikeforge/rng.hpp"
#include "spikeforge/tensor.hpp"

namespace spikeforge {

// --- 1D convolution ----------------------------------------------------------

struct Conv1d {
    std::size_t in_channels = 0;
    std::size_t out_channels = 0;
    std::size_t kernel_size = 0;
    std::size_t padding = 0;
    std::vector<double> weights;  // [out][in][k]
    std::vector<double> bias;     // [out]

    Conv1d() = default;
    Conv1d(std::size_t in_c, std::size_t out_c, std::size_t k, std::size_t pad)
        : in_channels(in_c), out_channels(out_c), kernel_size(k), padding(pad),
          weights(out_c * in_c * k, 0.0), bias(out_c, 0.0) {
        if (k < 1) throw std::invalid_argument("kernel_size must be >= 1");
    }

    double& w(std::size_t o, std::size_t i, std::size_t k) {
        return weights[(o * in_channels + i) * kernel_size + k];
    }
    double w(std::size_t o, std::size_t i, std::size_t k) const {
        return weights[(o * in_channels + i) * kernel_size + k];
    }

    std::size_t output_length(std::size_t input_length) const {
        const std::size_t padded = input_length + 2 * padding;
        if (padded < kernel_size)
            throw std::invalid_argument("conv1d: input shorter than kernel");
        return padded - kernel_size + 1;
    }

    void init_uniform(Rng& rng) {
        const double bound =
            std::sqrt(1.0 / static_cast<double>(in_channels * kernel_size));
        for (double& v : weights) v = rng.uniform(-bound, bound);
        for (double& v : bias) v = rng.uniform(-bound, bound);
    }
};

// out[o][t] = bias[o] + sum_i sum_k w[o][i][k] * x_padded[i][t + k]
inline Tensor conv1d_forward(const Tensor& input, const Conv1d& layer) {
    if (input.channels != layer.in_channels)
        throw std::invalid_argument("conv1d: input channels " +
                                    std::to_string(input.channels) + " != layer in_channels " +
                                    std::to_string(layer.in_channels));
    const std::size_t out_len = layer.output_length(input.length);
    Tensor out(layer.out_channels, out_len);
    for (std::size_t o = 0; o < layer.out_channels; ++o) {
        for (std::size_t t = 0; t < out_len; ++t) out.at(o, t) = layer.bias[o];
        for (std::size_t i = 0; i < layer.in_channels; ++i) {
            for (std::size_t k = 0; k < layer.kernel_size; ++k) {
                const double wk = layer.w(o, i, k);
                // x index = t + k - padding, skipping the zero-padded region
                const std::ptrdiff_t shift =
                    static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(layer.padding);
                const std::ptrdiff_t t_begin = std::max<std::ptrdiff_t>(0, -shift);
                const std::ptrdiff_t t_end =
                    std::min(static_cast<std::ptrdiff_t>(out_len),
                             static_cast<std::ptrdiff_t>(input.length) - shift);
                for (std::ptrdiff_t t = t_begin; t < t_end; ++t)
                    out.at(o, static_cast<std::size_t>(t)) +=
                        wk * input.at(i, static_cast<std::size_t>(t + shift));
            }
        }
    }
    return out;
}

struct Conv1dGrads {
    Tensor input_grad;
    std::vector<double> weight_grad;
    std::vector<double> bias_grad;
};

inline Conv1dGrads conv1d_backward(const Tensor& upstream, const Tensor& cached_input,
                                   const Conv1d& layer) {
    if (cached_input.channels != layer.in_channels)
        throw std::invalid_argument("conv1d backward: cached input channels " +
                                    std::to_string(cached_input.channels) +
                                    " != layer in_channels " +
                                    std::to_string(layer.in_channels));
    const std::size_t out_len = layer.output_length(cached_input.length);
    if (upstream.channels != layer.out_channels || upstream.length != out_len)
        throw std::invalid_argument("conv1d backward: upstream shape " + upstream.shape_str() +
                                    " != (" + std::to_string(layer.out_channels) + ", " +
                                    std::to_string(out_len) + ")");

    Conv1dGrads g;
    g.input_grad = Tensor(cached_input.channels, cached_input.length);
    g.weight_grad.assign(layer.weights.size(), 0.0);
    g.bias_grad.assign(layer.bias.size(), 0.0);

    for (std::size_t o = 0; o < layer.out_channels; ++o) {
        for (std::size_t t = 0; t < out_len; ++t) g.bias_grad[o] += upstream.at(o, t);
        for (std::size_t i = 0; i < layer.in_channels; ++i) {
            for (std::size_t k = 0; k < layer.kernel_size; ++k) {
                const double wk = layer.w(o, i, k);
                double wg = 0.0;
                const std::ptrdiff_t shift =
                    static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(layer.padding);
                const std::ptrdiff_t t_begin = std::max<std::ptrdiff_t>(0, -shift);
                const std::ptrdiff_t t_end =
                    std::min(static_cast<std::ptrdiff_t>(out_len),
                             static_cast<std::ptrdiff_t>(cached_input.length) - shift);
                for (std::ptrdiff_t t = t_begin; t < t_end; ++t) {
                    const std::size_t x = static_cast<std::size_t>(t + shift);
                    const double up = upstream.at(o, static_cast<std::size_t>(t));
                    wg += up * cached_input.at(i, x);
                    g.input_grad.at(i, x) += up * wk;
                }
                g.weight_grad[(o * layer.in_channels + i) * layer.kernel_size + k] += wg;
            }
        }
    }
    return g;
}

// --- Leaky ReLU ----------------------------------------------------------------

inline Tensor leaky_relu(const Tensor& x, double slope) {
    if (slope <= 0.0) throw std::invalid_argument("leaky relu slope must be positive");
    Tensor out = x;
    for (double& v : out.values)
        if (v <= 0.0) v *= slope;
    return out;
}

// Derivative at exactly 0 is taken as the slope.
inline Tensor leaky_relu_backward(const Tensor& upstream, const Tensor& cached_input,
                                  double slope) {
    if (!upstream.same_shape(cached_input))
        throw std::invalid_argument("leaky relu backward: shape mismatch " +
                                    upstream.shape_str() + " vs " + cached_input.shape_str());
    Tensor out = upstream;
    for (std::size_t i = 0; i < out.values.size(); ++i)
        if (cached_input.values[i] <= 0.0) out.values[i] *= slope;
    return out;
}

// --- dropout -------------------------------------------------------------------

enum class Mode { train, eval };

// Inverted dropout: survivors are scaled by 1/(1-p) so eval mode is the
// identity. The mask holds the per-element multiplier and is reused by the
// backward pass.
struct DropoutResult {
    Tensor output;
    std::vector<double> mask;  // 0 or 1/(1-p); empty when no masking happened
};

inline DropoutResult dropout(const Tensor& x, double p, Mode mode, Rng& rng) {
    if (p < 0.0 || p >= 1.0) throw std::invalid_argument("dropout p must be in [0, 1)");
    DropoutResult r;
    if (mode == Mode::eval || p == 0.0) {
        r.output = x;
        return r;
    }
    const double keep_scale = 1.0 / (1.0 - p);
    r.output = x;
    r.mask.resize(x.values.size());
    for (std::size_t i = 0; i < x.values.size(); ++i) {
        r.mask[i] = rng.uniform01() < p ? 0.0 : keep_scale;
        r.output.values[i] *= r.mask[i];
    }
    return r;
}

inline Tensor dropout_backward(const Tensor& upstream, const std::vector<double>& mask) {
    if (mask.empty()) return upstream;  // eval mode or p = 0
    if (mask.size() != upstream.values.size())
        throw std::invalid_argument("dropout backward: mask size mismatch");
    Tensor out = upstream;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= mask[i];
    return out;
}

// --- sigmoid -------------------------------------------------------------------

// Sign-split formulation; no overflow for any finite input.
inline double sigmoid_scalar(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

inline Tensor sigmoid(const Tensor& x) {
    Tensor out = x;
    for (double& v : out.values) v = sigmoid_scalar(v);
    return out;
}

// d/dx sigmoid(x) = s(x) * (1 - s(x)), expressed via the cached output.
inline Tensor sigmoid_backward(const Tensor& upstream, const Tensor& cached_output) {
    if (!upstream.same_shape(cached_output))
        throw std::invalid_argument("sigmoid backward: shape mismatch " +
                                    upstream.shape_str() + " vs " + cached_output.shape_str());
    Tensor out = upstream;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        const double s = cached_output.values[i];
        out.values[i] *= s * (1.0 - s);
    }
    return out;
}

// --- binary cross-entropy over the two sigmoid outputs --------------------------

struct BceResult {
    double loss = 0.0;
    std::array<double, 2> score_grads{};
};

// loss = -(1/2) * sum_j [ t_j ln s_j + (1 - t_j) ln(1 - s_j) ], scores clamped
// to [eps, 1-eps] before the logs and the gradient denominators.
inline BceResult bce_loss(const std::array<double, 2>& scores,
                          const std::array<double, 2>& target) {
    const bool one_hot = (target[0] == 0.0 && target[1] == 1.0) ||
                         (target[0] == 1.0 && target[1] == 0.0);
    if (!one_hot) throw std::invalid_argument("bce target must be one-hot");

    constexpr double eps = 1e-12;
    BceResult r;
    for (std::size_t j = 0; j < 2; ++j) {
        const double s = std::min(1.0 - eps, std::max(eps, scores[j]));
        r.loss += -0.5 * (target[j] * std::log(s) + (1.0 - target[j]) * std::log(1.0 - s));
        r.score_grads[j] = -0.5 * (target[j] / s - (1.0 - target[j]) / (1.0 - s));
    }
    return r;
}

}  // namespace spikeforge
