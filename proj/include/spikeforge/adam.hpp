#pragma once

// Adam with bias correction over an ordered list of parameter vectors.
// One call = one optimizer step for every parameter.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spikeforge {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    std::uint64_t step = 0;
    std::vector<std::vector<double>> m;  // first moments, parallel to the param list
    std::vector<std::vector<double>> v;  // second moments

    static AdamState for_params(std::span<std::vector<double>* const> params) {
        AdamState s;
        s.m.reserve(params.size());
        s.v.reserve(params.size());
        for (const auto* p : params) {
            s.m.emplace_back(p->size(), 0.0);
            s.v.emplace_back(p->size(), 0.0);
        }
        return s;
    }
};

inline void adam_step(std::span<std::vector<double>* const> params,
                      std::span<const std::vector<double>> grads, AdamState& state, double lr,
                      const AdamConfig& cfg = {}) {
    if (params.size() != grads.size() || params.size() != state.m.size() ||
        params.size() != state.v.size())
        throw std::invalid_argument("adam: parameter/gradient/state count mismatch");
    state.step += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (std::size_t j = 0; j < params.size(); ++j) {
        std::vector<double>& p = *params[j];
        const std::vector<double>& g = grads[j];
        std::vector<double>& m = state.m[j];
        std::vector<double>& v = state.v[j];
        if (p.size() != g.size() || p.size() != m.size())
            throw std::invalid_argument("adam: shape mismatch in parameter " +
                                        std::to_string(j));
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            p[i] -= lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
        }
    }
}

}  // namespace spikeforge
