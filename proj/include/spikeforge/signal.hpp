#pragma once

// Robust statistics and filtering primitives for extracellular traces:
// median, scaled MAD, renormalization to unit noise SD, box filtering,
// rectification. All arithmetic is double precision; all functions are pure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spikeforge {

// Gaussian third-quartile constant: scaled MAD = MAD / 0.6745 estimates the
// standard deviation of normally distributed data.
inline constexpr double kMadToSd = 0.6745;

struct Recording {
    std::vector<double> samples;
    std::uint32_t sample_rate_hz = 24000;
    std::string id;
    std::int32_t channel = 0;
};

struct SignalStats {
    double median = 0.0;
    double mad = 0.0;  // scaled by 1/0.6745, comparable to sd
    double sd = 0.0;
};

inline double median(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("empty sequence");
    std::vector<double> sorted(values.begin(), values.end());
    const std::size_t mid = sorted.size() / 2;
    std::nth_element(sorted.begin(), sorted.begin() + mid, sorted.end());
    if (sorted.size() % 2 == 1) return sorted[mid];
    const double upper = sorted[mid];
    const double lower = *std::max_element(sorted.begin(), sorted.begin() + mid);
    return (lower + upper) / 2.0;
}

inline double mad(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("empty sequence");
    const double med = median(values);
    std::vector<double> deviations(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        deviations[i] = std::abs(values[i] - med);
    return median(deviations) / kMadToSd;
}

// Sample standard deviation (n-1 divisor; 0 for a single sample).
inline double sd(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("empty sequence");
    if (values.size() == 1) return 0.0;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

inline SignalStats signal_stats(std::span<const double> values) {
    SignalStats s;
    s.median = median(values);
    s.mad = mad(values);
    s.sd = sd(values);
    return s;
}

// Divides every sample by the scaled MAD so background-noise SD lands near 1.
inline Recording renormalize(const Recording& recording) {
    const double scale = mad(recording.samples);
    if (scale == 0.0) throw std::runtime_error("degenerate signal: zero MAD");
    Recording out = recording;
    for (double& v : out.samples) v /= scale;
    return out;
}

// Centered moving average; the window shrinks at the edges so the output
// keeps the input's length and index alignment.
inline std::vector<double> box_filter(std::span<const double> samples, std::size_t width) {
    if (width < 1 || width % 2 == 0)
        throw std::invalid_argument("box filter width must be odd");
    const std::size_t n = samples.size();
    const std::size_t half = width / 2;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= half ? i - half : 0;
        const std::size_t hi = std::min(n, i + half + 1);
        double sum = 0.0;
        for (std::size_t j = lo; j < hi; ++j) sum += samples[j];
        out[i] = sum / static_cast<double>(hi - lo);
    }
    return out;
}

inline std::vector<double> rectify(std::span<const double> samples) {
    std::vector<double> out(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) out[i] = std::abs(samples[i]);
    return out;
}

}  // namespace spikeforge
