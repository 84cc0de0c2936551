#pragma once

// Synthetic microelectrode recordings with ground truth: Gaussian background
// noise plus biphasic spike templates (one-cycle damped sine) placed by a
// Poisson process thinned to a refractory gap. Everything is a pure function
// of the config, so downstream detection and training claims are testable.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spikeforge/rng.hpp"
#include "spikeforge/signal.hpp"

namespace spikeforge {

struct SynthConfig {
    double duration_s = 4.0;
    std::uint32_t sample_rate_hz = 24000;
    double noise_sd = 1.0;
    double firing_rate_hz = 10.0;
    double amplitude_low = 6.0;   // multiples of noise_sd
    double amplitude_high = 10.0;
    double template_width_ms = 1.0;
    double refractory_ms = 2.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (duration_s <= 0.0) throw std::invalid_argument("duration_s must be positive");
        if (sample_rate_hz == 0) throw std::invalid_argument("sample_rate_hz must be positive");
        if (noise_sd <= 0.0) throw std::invalid_argument("noise_sd must be positive");
        if (firing_rate_hz < 0.0) throw std::invalid_argument("firing_rate_hz must be >= 0");
        if (amplitude_low > amplitude_high)
            throw std::invalid_argument("amplitude_low must not exceed amplitude_high");
        if (template_width_ms <= 0.0)
            throw std::invalid_argument("template_width_ms must be positive");
        if (refractory_ms < template_width_ms)
            throw std::invalid_argument("refractory_ms must be >= template_width_ms");
        if (firing_rate_hz * refractory_ms / 1000.0 >= 1.0)
            throw std::invalid_argument(
                "firing rate too high for the refractory gap: no consistent placement exists");
    }
};

struct GroundTruth {
    std::vector<std::size_t> spike_indices;  // peak positions, strictly increasing
    std::vector<double> amplitudes;          // per-spike peak multiples of noise_sd
};

// One-cycle damped sine, peak normalized to 1. Returns the waveform and the
// offset of its absolute peak.
inline std::pair<std::vector<double>, std::size_t> spike_template(std::size_t width_samples,
                                                                  double damping = 3.0) {
    if (width_samples < 2) throw std::invalid_argument("template width too short");
    std::vector<double> shape(width_samples);
    double peak = 0.0;
    std::size_t peak_index = 0;
    for (std::size_t x = 0; x < width_samples; ++x) {
        const double u = static_cast<double>(x) / static_cast<double>(width_samples);
        shape[x] = std::exp(-damping * u) * std::sin(2.0 * std::numbers::pi * u);
        if (std::abs(shape[x]) > peak) {
            peak = std::abs(shape[x]);
            peak_index = x;
        }
    }
    for (double& v : shape) v /= peak;
    return {std::move(shape), peak_index};
}

inline std::pair<Recording, GroundTruth> generate_recording(const SynthConfig& config) {
    config.validate();
    const double fs = static_cast<double>(config.sample_rate_hz);
    const std::size_t n = static_cast<std::size_t>(std::llround(config.duration_s * fs));
    const std::size_t width =
        static_cast<std::size_t>(std::llround(config.template_width_ms * fs / 1000.0));
    const std::size_t refractory =
        static_cast<std::size_t>(std::llround(config.refractory_ms * fs / 1000.0));
    const auto [shape, peak_offset] = spike_template(width);

    Rng rng(config.seed);
    Recording rec;
    rec.sample_rate_hz = config.sample_rate_hz;
    rec.id = "synth-" + std::to_string(config.seed);
    rec.channel = 0;
    rec.samples.resize(n);
    for (double& v : rec.samples) v = config.noise_sd * rng.gaussian();

    GroundTruth truth;
    if (config.firing_rate_hz > 0.0) {
        const double mean_gap = fs / config.firing_rate_hz;  // samples between arrivals
        double t = 0.0;
        double last_start = -static_cast<double>(n);
        for (;;) {
            t += -std::log(1.0 - rng.uniform01()) * mean_gap;
            const double start = std::floor(t);
            if (start + static_cast<double>(width) > static_cast<double>(n)) break;
            if (start - last_start < static_cast<double>(refractory)) continue;
            const std::size_t s = static_cast<std::size_t>(start);
            const double amplitude = rng.uniform(config.amplitude_low, config.amplitude_high);
            for (std::size_t x = 0; x < width; ++x)
                rec.samples[s + x] += amplitude * config.noise_sd * shape[x];
            truth.spike_indices.push_back(s + peak_offset);
            truth.amplitudes.push_back(amplitude);
            last_start = start;
        }
    }
    return {std::move(rec), std::move(truth)};
}

}  // namespace spikeforge
