#pragma once

// Threshold-based spike detection: renormalize the trace, set the threshold
// from its standard deviation, pick local maxima of the box-filtered and
// rectified trace, then drop events closer together than the refractory gap.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "spikeforge/signal.hpp"

namespace spikeforge {

struct DetectionConfig {
    double threshold_multiplier = 4.0;
    std::size_t box_width = 5;            // odd; ~0.2 ms at 24 kHz
    std::size_t min_spike_distance = 24;  // 1 ms at 24 kHz
    std::optional<double> max_amplitude;  // artifact cap on the rectified trace

    void validate() const {
        if (threshold_multiplier <= 0.0)
            throw std::invalid_argument("threshold_multiplier must be positive");
        if (box_width < 1 || box_width % 2 == 0)
            throw std::invalid_argument("box filter width must be odd");
        if (min_spike_distance < 1)
            throw std::invalid_argument("min_spike_distance must be >= 1");
        if (max_amplitude && *max_amplitude <= 0.0)
            throw std::invalid_argument("max_amplitude must be positive");
    }
};

enum class Polarity : std::uint8_t { positive, negative };

struct SpikeEvent {
    std::size_t index = 0;   // sample index on the raw recording's axis
    double amplitude = 0.0;  // renormalized filtered+rectified value at the peak
    Polarity polarity = Polarity::positive;
};

using Candidate = std::pair<std::size_t, double>;  // (index, amplitude)

// threshold_multiplier times the sample SD of the renormalized trace
// (close to the multiplier itself once noise SD is driven to ~1).
inline double compute_threshold(std::span<const double> renormalized,
                                const DetectionConfig& config) {
    config.validate();
    return config.threshold_multiplier * sd(renormalized);
}

// Local maxima above the threshold. Plateaus contribute their first sample
// (strict rise on the left, non-strict on the right); the first and last
// samples are never candidates.
inline std::vector<Candidate> detect_candidates(std::span<const double> trace,
                                                double threshold) {
    if (threshold <= 0.0) throw std::invalid_argument("threshold must be positive");
    std::vector<Candidate> out;
    for (std::size_t i = 1; i + 1 < trace.size(); ++i) {
        if (trace[i] > threshold && trace[i - 1] < trace[i] && trace[i] >= trace[i + 1])
            out.emplace_back(i, trace[i]);
    }
    return out;
}

// Greedy selection in descending amplitude (ties: earlier index); an event
// survives only if no stronger survivor lies within min_distance samples.
inline std::vector<Candidate> enforce_refractory(std::span<const Candidate> candidates,
                                                 std::size_t min_distance) {
    if (min_distance < 1) throw std::invalid_argument("min_distance must be >= 1");
    for (std::size_t i = 1; i < candidates.size(); ++i)
        if (candidates[i].first <= candidates[i - 1].first)
            throw std::invalid_argument("candidates must be sorted");

    std::vector<Candidate> by_priority(candidates.begin(), candidates.end());
    std::sort(by_priority.begin(), by_priority.end(), [](const Candidate& a, const Candidate& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    std::vector<Candidate> kept;
    for (const Candidate& c : by_priority) {
        bool blocked = false;
        for (const Candidate& k : kept) {
            const std::size_t gap = c.first > k.first ? c.first - k.first : k.first - c.first;
            if (gap < min_distance) {
                blocked = true;
                break;
            }
        }
        if (!blocked) kept.push_back(c);
    }
    std::sort(kept.begin(), kept.end(),
              [](const Candidate& a, const Candidate& b) { return a.first < b.first; });
    return kept;
}

inline std::vector<SpikeEvent> detect_spikes(const Recording& recording,
                                             const DetectionConfig& config) {
    config.validate();
    const Recording renorm = renormalize(recording);
    const double threshold = compute_threshold(renorm.samples, config);
    const std::vector<double> trace = rectify(box_filter(renorm.samples, config.box_width));

    std::vector<Candidate> candidates = detect_candidates(trace, threshold);
    if (config.max_amplitude) {
        std::erase_if(candidates,
                      [&](const Candidate& c) { return c.second > *config.max_amplitude; });
    }
    const std::vector<Candidate> kept = enforce_refractory(candidates, config.min_spike_distance);

    std::vector<SpikeEvent> events;
    events.reserve(kept.size());
    for (const auto& [index, amplitude] : kept) {
        events.push_back({index, amplitude,
                          recording.samples[index] >= 0.0 ? Polarity::positive
                                                          : Polarity::negative});
    }
    return events;
}

}  // namespace spikeforge
