#pragma once

// Versioned binary checkpoint: model config, every parameter tensor (64-bit
// little-endian floats in param_tensors() order), Adam moments and step
// count, the epoch number, the training RNG state, and a validation-metrics
// snapshot. Round trips are bit-exact, so a restored model reproduces
// forward outputs exactly and training can resume as if uninterrupted.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "spikeforge/adam.hpp"
#include "spikeforge/binary_io.hpp"
#include "spikeforge/model.hpp"
#include "spikeforge/rng.hpp"

namespace spikeforge {

inline constexpr char kCheckpointMagic[9] = "SPKFCKPT";
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct MetricsSnapshot {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double auc = 0.0;
    std::uint64_t tp = 0, tn = 0, fp = 0, fn = 0;
};

struct Checkpoint {
    ModelConfig model_config;
    std::uint32_t epoch = 0;
    std::vector<std::vector<double>> params;  // param_tensors() order
    AdamState adam;
    Rng::State rng_state{};
    MetricsSnapshot metrics;
};

inline Checkpoint make_checkpoint(const SpikeClassifier& model, const AdamState& adam,
                                  std::uint32_t epoch, const Rng& rng,
                                  const MetricsSnapshot& metrics) {
    Checkpoint c;
    c.model_config = model.config();
    c.epoch = epoch;
    for (const auto* p : model.param_tensors()) c.params.push_back(*p);
    c.adam = adam;
    c.rng_state = rng.state();
    c.metrics = metrics;
    return c;
}

// Rebuilds the classifier and overwrites its freshly initialized parameters
// with the checkpointed ones.
inline SpikeClassifier model_from_checkpoint(const Checkpoint& c) {
    SpikeClassifier model(c.model_config);
    auto tensors = model.param_tensors();
    if (tensors.size() != c.params.size())
        throw std::runtime_error("checkpoint parameter list does not match model");
    for (std::size_t j = 0; j < tensors.size(); ++j) {
        if (tensors[j]->size() != c.params[j].size())
            throw std::runtime_error("checkpoint parameter " + std::to_string(j) +
                                     " has wrong size");
        *tensors[j] = c.params[j];
    }
    return model;
}

namespace detail {

inline void write_tensor_list(ByteWriter& w, const std::vector<std::vector<double>>& list) {
    w.u32(static_cast<std::uint32_t>(list.size()));
    for (const auto& t : list) {
        w.u64(t.size());
        for (double v : t) w.f64(v);
    }
}

inline std::vector<std::vector<double>> read_tensor_list(ByteReader& r) {
    std::vector<std::vector<double>> list(r.u32());
    for (auto& t : list) {
        t.resize(r.u64());
        for (double& v : t) v = r.f64();
    }
    return list;
}

}  // namespace detail

inline std::string serialize_checkpoint(const Checkpoint& c) {
    ByteWriter w;
    w.raw(std::string(kCheckpointMagic, 8));
    w.u32(kCheckpointVersion);
    w.u64(static_cast<std::uint64_t>(c.model_config.num_blocks));
    w.u64(static_cast<std::uint64_t>(c.model_config.hidden_channels));
    w.u64(static_cast<std::uint64_t>(c.model_config.kernel_size));
    w.f64(c.model_config.dropout_p);
    w.f64(c.model_config.leaky_slope);
    w.u64(c.model_config.seed);
    w.u32(c.epoch);
    detail::write_tensor_list(w, c.params);
    w.u64(c.adam.step);
    detail::write_tensor_list(w, c.adam.m);
    detail::write_tensor_list(w, c.adam.v);
    for (std::uint64_t s : c.rng_state) w.u64(s);
    w.f64(c.metrics.accuracy);
    w.f64(c.metrics.precision);
    w.f64(c.metrics.recall);
    w.f64(c.metrics.f1);
    w.f64(c.metrics.auc);
    w.u64(c.metrics.tp);
    w.u64(c.metrics.tn);
    w.u64(c.metrics.fp);
    w.u64(c.metrics.fn);
    return w.bytes;
}

inline Checkpoint parse_checkpoint(const std::string& bytes) {
    ByteReader r{bytes};
    if (r.raw(8) != std::string(kCheckpointMagic, 8))
        throw std::runtime_error("not a checkpoint file");
    const std::uint32_t version = r.u32();
    if (version != kCheckpointVersion)
        throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
    Checkpoint c;
    c.model_config.num_blocks = static_cast<std::size_t>(r.u64());
    c.model_config.hidden_channels = static_cast<std::size_t>(r.u64());
    c.model_config.kernel_size = static_cast<std::size_t>(r.u64());
    c.model_config.dropout_p = r.f64();
    c.model_config.leaky_slope = r.f64();
    c.model_config.seed = r.u64();
    c.epoch = r.u32();
    c.params = detail::read_tensor_list(r);
    c.adam.step = r.u64();
    c.adam.m = detail::read_tensor_list(r);
    c.adam.v = detail::read_tensor_list(r);
    for (std::uint64_t& s : c.rng_state) s = r.u64();
    c.metrics.accuracy = r.f64();
    c.metrics.precision = r.f64();
    c.metrics.recall = r.f64();
    c.metrics.f1 = r.f64();
    c.metrics.auc = r.f64();
    c.metrics.tp = r.u64();
    c.metrics.tn = r.u64();
    c.metrics.fp = r.u64();
    c.metrics.fn = r.u64();
    if (!r.exhausted()) throw std::runtime_error("trailing bytes in checkpoint");
    return c;
}

inline void save_checkpoint(const Checkpoint& c, const std::string& path) {
    write_file(path, serialize_checkpoint(c));
}

inline Checkpoint load_checkpoint(const std::string& path) {
    try {
        return parse_checkpoint(read_file(path));
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

}  // namespace spikeforge
