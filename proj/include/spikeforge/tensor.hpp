#pragma once

// Minimal (channels x length) tensor of doubles, row-major per channel.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace spikeforge {

struct Tensor {
    std::size_t channels = 0;
    std::size_t length = 0;
    std::vector<double> values;

    Tensor() = default;
    Tensor(std::size_t c, std::size_t l) : channels(c), length(l), values(c * l, 0.0) {}

    double& at(std::size_t c, std::size_t t) { return values[c * length + t]; }
    double at(std::size_t c, std::size_t t) const { return values[c * length + t]; }

    std::size_t size() const { return values.size(); }

    bool same_shape(const Tensor& other) const {
        return channels == other.channels && length == other.length;
    }

    std::string shape_str() const {
        return "(" + std::to_string(channels) + ", " + std::to_string(length) + ")";
    }
};

inline void require_shape(const Tensor& t, std::size_t channels, std::size_t length,
                          const char* what) {
    if (t.channels != channels || t.length != length)
        throw std::invalid_argument(std::string(what) + ": expected (" +
                                    std::to_string(channels) + ", " + std::to_string(length) +
                                    "), got " + t.shape_str());
}

}  // namespace spikeforge
