#pragma once

// The spike/no-spike window classifier. A two-stage convolutional stem lifts
// the single channel to hidden_channels, a (dropout -> conv1d -> Leaky ReLU)
// block repeats num_blocks times, and a head convolution spanning the whole
// remaining extent maps to two length-1 outputs squashed by a sigmoid.
// Score order is fixed: [no_spike, spike].
//
// Gradients are hand-derived layer by layer; train_example runs one
// forward/backward pass and accumulates parameter gradients.

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spikeforge/dataset.hpp"
#include "spikeforge/layers.hpp"
#include "spikeforge/rng.hpp"
#include "spikeforge/tensor.hpp"

namespace spikeforge {

struct ModelConfig {
    std::size_t num_blocks = 6;
    std::size_t hidden_channels = 16;
    std::size_t kernel_size = 3;
    double dropout_p = 0.1;
    double leaky_slope = 0.01;
    std::uint64_t seed = 0;

    void validate() const {
        if (num_blocks < 1) throw std::invalid_argument("num_blocks must be >= 1");
        if (hidden_channels < 1) throw std::invalid_argument("hidden_channels must be >= 1");
        if (kernel_size < 1 || kernel_size % 2 == 0)
            throw std::invalid_argument("kernel_size must be odd");
        if (dropout_p < 0.0 || dropout_p >= 1.0)
            throw std::invalid_argument("dropout_p must be in [0, 1)");
        if (leaky_slope <= 0.0) throw std::invalid_argument("leaky_slope must be positive");
    }
};

// Gradient buffers parallel to SpikeClassifier::param_tensors() order.
using GradSet = std::vector<std::vector<double>>;

class SpikeClassifier {
public:
    explicit SpikeClassifier(const ModelConfig& config) : config_(config) {
        config.validate();
        const std::size_t h = config.hidden_channels;
        const std::size_t k = config.kernel_size;
        const std::size_t pad = (k - 1) / 2;  // length-preserving
        stem1_ = Conv1d(1, h, k, pad);
        stem2_ = Conv1d(h, h, k, pad);
        blocks_.reserve(config.num_blocks);
        for (std::size_t b = 0; b < config.num_blocks; ++b)
            blocks_.emplace_back(h, h, k, pad);
        head_ = Conv1d(h, 2, kWindowLength, 0);

        Rng rng(config.seed);
        stem1_.init_uniform(rng);
        stem2_.init_uniform(rng);
        for (Conv1d& b : blocks_) b.init_uniform(rng);
        head_.init_uniform(rng);
    }

    const ModelConfig& config() const { return config_; }

    // Parameter vectors in checkpoint order:
    // stem1.w, stem1.b, stem2.w, stem2.b, block[i].w, block[i].b ..., head.w, head.b
    std::vector<std::vector<double>*> param_tensors() {
        std::vector<std::vector<double>*> out = {&stem1_.weights, &stem1_.bias,
                                                 &stem2_.weights, &stem2_.bias};
        for (Conv1d& b : blocks_) {
            out.push_back(&b.weights);
            out.push_back(&b.bias);
        }
        out.push_back(&head_.weights);
        out.push_back(&head_.bias);
        return out;
    }

    std::vector<const std::vector<double>*> param_tensors() const {
        auto* self = const_cast<SpikeClassifier*>(this);
        std::vector<const std::vector<double>*> out;
        for (auto* p : self->param_tensors()) out.push_back(p);
        return out;
    }

    std::size_t param_count() const {
        std::size_t n = 0;
        for (const auto* p : param_tensors()) n += p->size();
        return n;
    }

    GradSet make_grad_set() const {
        GradSet g;
        for (const auto* p : param_tensors()) g.emplace_back(p->size(), 0.0);
        return g;
    }

    // Eval-mode scores [no_spike, spike]; pure and thread-safe.
    std::array<double, 2> forward(std::span<const float> window) const {
        const Tensor s = sigmoid(head_logits(input_tensor(window)));
        return {s.at(0, 0), s.at(1, 0)};
    }

    Label predict(std::span<const float> window) const {
        const std::array<double, 2> scores = forward(window);
        return scores[1] > scores[0] ? Label::spike : Label::no_spike;  // tie -> no_spike
    }

    // Eval-mode loss against a one-hot target; used by gradient checks.
    double loss_for(std::span<const float> window, const std::array<double, 2>& target) const {
        return bce_loss(forward(window), target).loss;
    }

    // Train-mode forward + backward for one example. Dropout masks are drawn
    // from `rng`; parameter gradients are added into `grads` (param order).
    // Returns the example loss and its scores.
    std::pair<double, std::array<double, 2>> train_example(std::span<const float> window,
                                                           const std::array<double, 2>& target,
                                                           Rng& rng, GradSet& grads) {
        if (grads.size() != 2 * (2 + blocks_.size()) + 2)
            throw std::invalid_argument("gradient set does not match parameter list");
        const double slope = config_.leaky_slope;

        const Tensor x0 = input_tensor(window);
        const Tensor z1 = conv1d_forward(x0, stem1_);
        const Tensor a1 = leaky_relu(z1, slope);
        const Tensor z2 = conv1d_forward(a1, stem2_);
        const Tensor a2 = leaky_relu(z2, slope);

        std::vector<DropoutResult> dropped(blocks_.size());
        std::vector<Tensor> block_pre(blocks_.size());
        std::vector<Tensor> block_act(blocks_.size());
        const Tensor* current = &a2;
        for (std::size_t b = 0; b < blocks_.size(); ++b) {
            dropped[b] = dropout(*current, config_.dropout_p, Mode::train, rng);
            block_pre[b] = conv1d_forward(dropped[b].output, blocks_[b]);
            block_act[b] = leaky_relu(block_pre[b], slope);
            current = &block_act[b];
        }

        const Tensor zh = conv1d_forward(*current, head_);
        const Tensor scores_t = sigmoid(zh);
        const std::array<double, 2> scores = {scores_t.at(0, 0), scores_t.at(1, 0)};
        const BceResult bce = bce_loss(scores, target);

        Tensor g(2, 1);
        g.at(0, 0) = bce.score_grads[0];
        g.at(1, 0) = bce.score_grads[1];
        g = sigmoid_backward(g, scores_t);

        const std::size_t head_slot = grads.size() - 2;
        Conv1dGrads hg = conv1d_backward(g, *current, head_);
        accumulate(grads[head_slot], hg.weight_grad);
        accumulate(grads[head_slot + 1], hg.bias_grad);
        Tensor flow = std::move(hg.input_grad);

        for (std::size_t b = blocks_.size(); b-- > 0;) {
            flow = leaky_relu_backward(flow, block_pre[b], slope);
            Conv1dGrads bg = conv1d_backward(flow, dropped[b].output, blocks_[b]);
            accumulate(grads[4 + 2 * b], bg.weight_grad);
            accumulate(grads[4 + 2 * b + 1], bg.bias_grad);
            flow = dropout_backward(bg.input_grad, dropped[b].mask);
        }

        flow = leaky_relu_backward(flow, z2, slope);
        Conv1dGrads g2 = conv1d_backward(flow, a1, stem2_);
        accumulate(grads[2], g2.weight_grad);
        accumulate(grads[3], g2.bias_grad);
        flow = leaky_relu_backward(g2.input_grad, z1, slope);
        Conv1dGrads g1 = conv1d_backward(flow, x0, stem1_);
        accumulate(grads[0], g1.weight_grad);
        accumulate(grads[1], g1.bias_grad);

        return {bce.loss, scores};
    }

private:
    static Tensor input_tensor(std::span<const float> window) {
        if (window.size() != kWindowLength)
            throw std::invalid_argument("classifier input must have " +
                                        std::to_string(kWindowLength) + " samples, got " +
                                        std::to_string(window.size()));
        Tensor x(1, kWindowLength);
        for (std::size_t i = 0; i < kWindowLength; ++i)
            x.values[i] = static_cast<double>(window[i]);
        return x;
    }

    Tensor head_logits(const Tensor& x0) const {
        const double slope = config_.leaky_slope;
        Tensor a = leaky_relu(conv1d_forward(x0, stem1_), slope);
        a = leaky_relu(conv1d_forward(a, stem2_), slope);
        for (const Conv1d& b : blocks_)  // dropout is the identity in eval mode
            a = leaky_relu(conv1d_forward(a, b), slope);
        return conv1d_forward(a, head_);
    }

    static void accumulate(std::vector<double>& into, const std::vector<double>& from) {
        for (std::size_t i = 0; i < into.size(); ++i) into[i] += from[i];
    }

    ModelConfig config_;
    Conv1d stem1_, stem2_;
    std::vector<Conv1d> blocks_;
    Conv1d head_;
};

inline std::array<double, 2> one_hot(Label label) {
    return label == Label::spike ? std::array<double, 2>{0.0, 1.0}
                                 : std::array<double, 2>{1.0, 0.0};
}

}  // namespace spikeforge
