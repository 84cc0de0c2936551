#pragma once

// Labeled 48-sample window dataset: positive windows around detected spikes,
// negative windows sampled away from any spike neighborhood, an 80:20
// train/validation split, fraction subsetting, and the .spkds file format.
//
// Window samples are raw (pre-renormalization) values kept as 32-bit floats,
// matching the on-disk representation bit for bit.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spikeforge/binary_io.hpp"
#include "spikeforge/detect.hpp"
#include "spikeforge/rng.hpp"
#include "spikeforge/signal.hpp"

namespace spikeforge {

inline constexpr std::size_t kWindowLength = 48;
inline constexpr std::size_t kHalfWindow = kWindowLength / 2;

enum class Label : std::uint8_t { no_spike = 0, spike = 1 };

struct Window {
    std::array<float, kWindowLength> values{};
    Label label = Label::no_spike;
    std::string source_id;
    std::size_t center_index = 0;
};

struct ClassCounts {
    std::size_t train_spike = 0;
    std::size_t train_no_spike = 0;
    std::size_t validation_spike = 0;
    std::size_t validation_no_spike = 0;
};

struct LabeledDataset {
    std::vector<Window> train;
    std::vector<Window> validation;
    std::uint64_t seed = 0;

    ClassCounts class_counts() const {
        ClassCounts c;
        for (const Window& w : train)
            (w.label == Label::spike ? c.train_spike : c.train_no_spike)++;
        for (const Window& w : validation)
            (w.label == Label::spike ? c.validation_spike : c.validation_no_spike)++;
        return c;
    }
};

struct DetectedRecording {
    Recording recording;
    std::vector<SpikeEvent> events;
};

// Raw samples [center-24, center+24); the center sample lands at slot 24.
inline Window extract_window(const Recording& recording, std::size_t center, Label label) {
    if (center < kHalfWindow || center + kHalfWindow > recording.samples.size())
        throw std::out_of_range("window out of bounds");
    Window w;
    w.label = label;
    w.source_id = recording.id;
    w.center_index = center;
    for (std::size_t j = 0; j < kWindowLength; ++j)
        w.values[j] = static_cast<float>(recording.samples[center - kHalfWindow + j]);
    return w;
}

// Centers whose window stays in bounds and at least 48 samples clear of every
// spike index (the window span must not touch [event-48, event+48]).
inline std::vector<std::size_t> admissible_negative_centers(
    const Recording& recording, std::span<const SpikeEvent> events) {
    const std::size_t n = recording.samples.size();
    if (n < kWindowLength) return {};

    std::vector<std::pair<std::size_t, std::size_t>> forbidden;  // [lo, hi] inclusive
    forbidden.reserve(events.size());
    for (const SpikeEvent& e : events) {
        const std::size_t lo =
            e.index >= kWindowLength + kHalfWindow - 1 ? e.index - (kWindowLength + kHalfWindow - 1) : 0;
        const std::size_t hi = e.index + kWindowLength + kHalfWindow;
        forbidden.emplace_back(lo, hi);
    }
    std::sort(forbidden.begin(), forbidden.end());

    std::vector<std::size_t> centers;
    std::size_t c = kHalfWindow;
    const std::size_t last = n - kHalfWindow;  // exclusive upper bound on centers
    for (const auto& [lo, hi] : forbidden) {
        for (; c < last && c < lo; ++c) centers.push_back(c);
        c = std::max(c, hi + 1);
    }
    for (; c < last; ++c) centers.push_back(c);
    return centers;
}

inline std::vector<Window> sample_negative_windows(const Recording& recording,
                                                   std::span<const SpikeEvent> events,
                                                   std::size_t count, std::uint64_t rng_seed) {
    std::vector<std::size_t> centers = admissible_negative_centers(recording, events);
    if (centers.size() < count)
        throw std::runtime_error("cannot sample " + std::to_string(count) +
                                 " negatives: only " + std::to_string(centers.size()) +
                                 " admissible centers");
    Rng rng(rng_seed);
    std::vector<Window> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {  // partial Fisher-Yates
        const std::size_t j = i + static_cast<std::size_t>(rng.next_below(centers.size() - i));
        std::swap(centers[i], centers[j]);
        out.push_back(extract_window(recording, centers[i], Label::no_spike));
    }
    return out;
}

inline LabeledDataset build_dataset(std::span<const DetectedRecording> recordings,
                                    double negatives_per_positive, std::uint64_t split_seed) {
    if (negatives_per_positive < 0.0)
        throw std::invalid_argument("negatives_per_positive must be >= 0");
    for (std::size_t i = 0; i < recordings.size(); ++i)
        for (std::size_t j = i + 1; j < recordings.size(); ++j)
            if (recordings[i].recording.id == recordings[j].recording.id)
                throw std::invalid_argument("duplicate recording id: " +
                                            recordings[i].recording.id);

    std::vector<Window> pool;
    std::uint64_t negative_seed_stream = split_seed;
    for (const DetectedRecording& dr : recordings) {
        std::size_t positives = 0;
        for (const SpikeEvent& e : dr.events) {
            if (e.index < kHalfWindow || e.index + kHalfWindow > dr.recording.samples.size())
                continue;  // too close to an edge for a full window
            pool.push_back(extract_window(dr.recording, e.index, Label::spike));
            ++positives;
        }
        const std::size_t negatives = static_cast<std::size_t>(
            std::llround(negatives_per_positive * static_cast<double>(positives)));
        const std::uint64_t rec_seed = splitmix64(negative_seed_stream);
        if (negatives > 0) {
            std::vector<Window> negs =
                sample_negative_windows(dr.recording, dr.events, negatives, rec_seed);
            for (Window& w : negs) pool.push_back(std::move(w));
        }
    }
    if (std::none_of(pool.begin(), pool.end(),
                     [](const Window& w) { return w.label == Label::spike; }))
        throw std::runtime_error("empty positive class");

    Rng rng(split_seed);
    rng.shuffle(pool);
    const std::size_t n_val =
        static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(pool.size())));
    LabeledDataset ds;
    ds.seed = split_seed;
    ds.train.assign(pool.begin(), pool.end() - static_cast<std::ptrdiff_t>(n_val));
    ds.validation.assign(pool.end() - static_cast<std::ptrdiff_t>(n_val), pool.end());
    return ds;
}

// Reduces the training split to floor(fraction * |train|) windows while
// leaving validation untouched. One label-balanced order is drawn per seed
// (per-class shuffles merged by a ratio walk) and every fraction takes a
// prefix of it, so smaller fractions are strict subsets of larger ones and
// any prefix keeps the class ratio within one window.
inline LabeledDataset subset_training(const LabeledDataset& dataset, double fraction,
                                      std::uint64_t seed) {
    if (!(fraction > 0.0) || fraction > 1.0)
        throw std::invalid_argument("fraction out of range (0, 1]");
    if (fraction == 1.0) return dataset;

    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < dataset.train.size(); ++i)
        (dataset.train[i].label == Label::spike ? pos : neg).push_back(i);
    Rng rng(seed);
    rng.shuffle(pos);
    rng.shuffle(neg);

    const std::size_t n = dataset.train.size();
    const std::size_t n_pos = pos.size();
    std::vector<std::size_t> order;
    order.reserve(n);
    std::size_t taken_pos = 0, taken_neg = 0;
    for (std::size_t t = 1; t <= n; ++t) {
        const std::size_t want_pos = (2 * t * n_pos + n) / (2 * n);  // round(t*n_pos/n)
        if (taken_pos < want_pos && taken_pos < n_pos)
            order.push_back(pos[taken_pos++]);
        else if (taken_neg < neg.size())
            order.push_back(neg[taken_neg++]);
        else
            order.push_back(pos[taken_pos++]);
    }

    const std::size_t keep =
        static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
    LabeledDataset out;
    out.seed = dataset.seed;
    out.validation = dataset.validation;
    out.train.reserve(keep);
    for (std::size_t t = 0; t < keep; ++t) out.train.push_back(dataset.train[order[t]]);
    return out;
}

// --- .spkds file format ------------------------------------------------------

inline constexpr char kDatasetMagic[9] = "SPKFDSET";
inline constexpr std::uint32_t kDatasetVersion = 1;

namespace detail {

inline void write_window(ByteWriter& w, const Window& win) {
    w.u8(static_cast<std::uint8_t>(win.label));
    w.str(win.source_id);
    w.u64(win.center_index);
    for (float v : win.values) w.f32(v);
}

inline Window read_window(ByteReader& r) {
    Window win;
    const std::uint8_t label = r.u8();
    if (label > 1) throw std::runtime_error("invalid label byte");
    win.label = static_cast<Label>(label);
    win.source_id = r.str();
    win.center_index = r.u64();
    for (float& v : win.values) v = r.f32();
    return win;
}

}  // namespace detail

inline void save_dataset(const LabeledDataset& dataset, const std::string& path) {
    ByteWriter w;
    w.raw(std::string(kDatasetMagic, 8));
    w.u32(kDatasetVersion);
    w.u32(kWindowLength);
    w.u64(dataset.seed);
    w.u64(dataset.train.size());
    w.u64(dataset.validation.size());
    for (const Window& win : dataset.train) detail::write_window(w, win);
    for (const Window& win : dataset.validation) detail::write_window(w, win);
    write_file(path, w.bytes);
}

inline LabeledDataset load_dataset(const std::string& path) {
    const std::string bytes = read_file(path);
    ByteReader r{bytes};
    if (r.raw(8) != std::string(kDatasetMagic, 8))
        throw std::runtime_error("not a dataset file: " + path);
    const std::uint32_t version = r.u32();
    if (version != kDatasetVersion)
        throw std::runtime_error("unsupported dataset version " + std::to_string(version) +
                                 " in " + path);
    const std::uint32_t window_len = r.u32();
    if (window_len != kWindowLength)
        throw std::runtime_error("unsupported window length " + std::to_string(window_len) +
                                 " in " + path);
    LabeledDataset ds;
    ds.seed = r.u64();
    const std::uint64_t n_train = r.u64();
    const std::uint64_t n_val = r.u64();
    for (std::uint64_t i = 0; i < n_train + n_val; ++i) {
        Window win;
        try {
            win = detail::read_window(r);
        } catch (const std::exception& e) {
            throw std::runtime_error("dataset record " + std::to_string(i) + " in " + path +
                                     ": " + e.what());
        }
        (i < n_train ? ds.train : ds.validation).push_back(std::move(win));
    }
    if (!r.exhausted()) throw std::runtime_error("trailing bytes in " + path);
    return ds;
}

}  // namespace spikeforge
