#pragma once

// Recording, event, and ground-truth file formats.
//
// Recordings come in two flavors, chosen by extension:
//   .csv  — first line is a JSON header object ({"format":"spikeforge.recording",
//           "version":1, "sample_rate_hz":..., "id":..., "channel":...}),
//           then one sample per line with full round-trip precision.
//   .f32  — raw little-endian 32-bit floats, with the same JSON header in a
//           sidecar file (extension replaced by .json) plus "num_samples".
//
// Spike events and synthesis ground truth are plain CSVs with header rows
// ("index,time_ms,amplitude,polarity" and "index,amplitude").

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spikeforge/binary_io.hpp"
#include "spikeforge/detect.hpp"
#include "spikeforge/signal.hpp"
#include "spikeforge/synth.hpp"

namespace spikeforge {

inline constexpr const char* kRecordingFormat = "spikeforge.recording";
inline constexpr int kRecordingVersion = 1;

namespace detail {

inline std::string format_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& text, const std::string& context) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) throw std::runtime_error("malformed number in " + context + ": " + text);
    return v;
}

inline nlohmann::json recording_header(const Recording& rec) {
    return {{"format", kRecordingFormat},
            {"version", kRecordingVersion},
            {"sample_rate_hz", rec.sample_rate_hz},
            {"id", rec.id},
            {"channel", rec.channel}};
}

inline void check_recording_header(const nlohmann::json& header, const std::string& path) {
    if (header.value("format", "") != kRecordingFormat)
        throw std::runtime_error("not a recording file: " + path);
    if (header.value("version", -1) != kRecordingVersion)
        throw std::runtime_error("unsupported recording version in " + path);
}

inline std::filesystem::path sidecar_path(const std::filesystem::path& f32_path) {
    std::filesystem::path p = f32_path;
    return p.replace_extension(".json");
}

}  // namespace detail

inline void save_recording_csv(const Recording& rec, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << detail::recording_header(rec).dump() << '\n';
    for (double v : rec.samples) out << detail::format_double(v) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline Recording load_recording_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty recording file: " + path);
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("bad recording header in " + path + ": " + e.what());
    }
    detail::check_recording_header(header, path);

    Recording rec;
    rec.sample_rate_hz = header.at("sample_rate_hz").get<std::uint32_t>();
    rec.id = header.at("id").get<std::string>();
    rec.channel = header.at("channel").get<std::int32_t>();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        rec.samples.push_back(detail::parse_double(line, path));
    }
    if (rec.samples.empty()) throw std::runtime_error("recording has no samples: " + path);
    return rec;
}

inline void save_recording_f32(const Recording& rec, const std::string& path) {
    ByteWriter w;
    for (double v : rec.samples) w.f32(static_cast<float>(v));
    write_file(path, w.bytes);

    nlohmann::json header = detail::recording_header(rec);
    header["num_samples"] = rec.samples.size();
    std::ofstream side(detail::sidecar_path(path), std::ios::trunc);
    if (!side) throw std::runtime_error("cannot open for writing: " + detail::sidecar_path(path).string());
    side << header.dump(2) << '\n';
}

inline Recording load_recording_f32(const std::string& path) {
    const std::string sidecar = detail::sidecar_path(path).string();
    std::ifstream side(sidecar);
    if (!side) throw std::runtime_error("cannot open: " + sidecar);
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(side);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("bad recording header in " + sidecar + ": " + e.what());
    }
    detail::check_recording_header(header, sidecar);

    Recording rec;
    rec.sample_rate_hz = header.at("sample_rate_hz").get<std::uint32_t>();
    rec.id = header.at("id").get<std::string>();
    rec.channel = header.at("channel").get<std::int32_t>();

    const std::string bytes = read_file(path);
    const std::size_t expected = header.at("num_samples").get<std::size_t>();
    if (bytes.size() != expected * sizeof(float))
        throw std::runtime_error("sample count mismatch in " + path);
    ByteReader r{bytes};
    rec.samples.resize(expected);
    for (double& v : rec.samples) v = static_cast<double>(r.f32());
    if (rec.samples.empty()) throw std::runtime_error("recording has no samples: " + path);
    return rec;
}

inline void save_recording(const Recording& rec, const std::string& path) {
    const std::string ext = std::filesystem::path(path).extension().string();
    if (ext == ".csv") return save_recording_csv(rec, path);
    if (ext == ".f32") return save_recording_f32(rec, path);
    throw std::invalid_argument("unknown recording extension (want .csv or .f32): " + path);
}

inline Recording load_recording(const std::string& path) {
    const std::string ext = std::filesystem::path(path).extension().string();
    if (ext == ".csv") return load_recording_csv(path);
    if (ext == ".f32") return load_recording_f32(path);
    throw std::invalid_argument("unknown recording extension (want .csv or .f32): " + path);
}

// --- spike events -----------------------------------------------------------

inline void save_events_csv(std::span<const SpikeEvent> events, std::uint32_t sample_rate_hz,
                            const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "index,time_ms,amplitude,polarity\n";
    const double per_ms = static_cast<double>(sample_rate_hz) / 1000.0;
    for (const SpikeEvent& e : events) {
        out << e.index << ',' << detail::format_double(static_cast<double>(e.index) / per_ms)
            << ',' << detail::format_double(e.amplitude) << ','
            << (e.polarity == Polarity::positive ? "positive" : "negative") << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::vector<SpikeEvent> load_events_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "index,time_ms,amplitude,polarity")
        throw std::runtime_error("not an events CSV: " + path);
    std::vector<SpikeEvent> events;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string index, time_ms, amplitude, polarity;
        if (!std::getline(row, index, ',') || !std::getline(row, time_ms, ',') ||
            !std::getline(row, amplitude, ',') || !std::getline(row, polarity))
            throw std::runtime_error("malformed events row in " + path + ": " + line);
        SpikeEvent e;
        e.index = static_cast<std::size_t>(std::stoull(index));
        e.amplitude = detail::parse_double(amplitude, path);
        if (polarity == "positive")
            e.polarity = Polarity::positive;
        else if (polarity == "negative")
            e.polarity = Polarity::negative;
        else
            throw std::runtime_error("malformed polarity in " + path + ": " + polarity);
        events.push_back(e);
    }
    return events;
}

// --- synthesis ground truth --------------------------------------------------

inline void save_truth_csv(const GroundTruth& truth, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "index,amplitude\n";
    for (std::size_t i = 0; i < truth.spike_indices.size(); ++i)
        out << truth.spike_indices[i] << ',' << detail::format_double(truth.amplitudes[i])
            << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline GroundTruth load_truth_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "index,amplitude")
        throw std::runtime_error("not a ground-truth CSV: " + path);
    GroundTruth truth;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("malformed truth row in " + path + ": " + line);
        truth.spike_indices.push_back(
            static_cast<std::size_t>(std::stoull(line.substr(0, comma))));
        truth.amplitudes.push_back(detail::parse_double(line.substr(comma + 1), path));
    }
    return truth;
}

}  // namespace spikeforge
