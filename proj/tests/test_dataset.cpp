#include <catch2/catch_amalgamated.hpp>

#include <spikeforge/dataset.hpp>
#include <spikeforge/rng.hpp>

#include <cstdio>
#include <filesystem>
#include <set>

using namespace spikeforge;

namespace {

Recording ramp_recording(std::size_t n, const std::string& id = "ramp") {
    Recording rec;
    rec.id = id;
    rec.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) rec.samples[i] = static_cast<double>(i);
    return rec;
}

Recording noise_recording(std::size_t n, std::uint64_t seed, const std::string& id) {
    Rng rng(seed);
    Recording rec;
    rec.id = id;
    rec.samples.resize(n);
    for (double& v : rec.samples) v = rng.gaussian();
    return rec;
}

std::vector<SpikeEvent> events_at(std::initializer_list<std::size_t> indices) {
    std::vector<SpikeEvent> events;
    for (std::size_t i : indices) events.push_back({i, 5.0, Polarity::positive});
    return events;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("extract_window slices the centered raw samples") {
    const Recording rec = ramp_recording(100);
    const Window w = extract_window(rec, 50, Label::spike);
    REQUIRE(w.values.size() == 48);
    for (std::size_t j = 0; j < 48; ++j) CHECK(w.values[j] == static_cast<float>(26 + j));
    CHECK(w.center_index == 50);
    CHECK(w.source_id == "ramp");
}

TEST_CASE("extract_window puts the center sample at slot 24") {
    const Recording rec = noise_recording(500, 3, "n");
    const Window w = extract_window(rec, 200, Label::spike);
    CHECK(w.values[24] == static_cast<float>(rec.samples[200]));
}

TEST_CASE("extract_window rejects out-of-bounds centers") {
    const Recording rec = ramp_recording(100);
    CHECK_THROWS_WITH(extract_window(rec, 10, Label::spike), "window out of bounds");
    CHECK_THROWS_WITH(extract_window(rec, 90, Label::spike), "window out of bounds");
    CHECK_NOTHROW(extract_window(rec, 24, Label::spike));
    CHECK_NOTHROW(extract_window(rec, 76, Label::spike));
}

TEST_CASE("negative sampling with no events is unconstrained and deterministic") {
    const Recording rec = ramp_recording(500);
    const auto a = sample_negative_windows(rec, {}, 5, 99);
    const auto b = sample_negative_windows(rec, {}, 5, 99);
    REQUIRE(a.size() == 5);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].center_index == b[i].center_index);
        CHECK(a[i].label == Label::no_spike);
        CHECK(a[i].center_index >= 24);
        CHECK(a[i].center_index + 24 <= 500);
    }
}

TEST_CASE("negative sampling lands on the only admissible center") {
    // centers live in [24, 143]; an event at 96 forbids [25, 168], leaving 24
    const Recording rec = ramp_recording(168);
    const auto windows = sample_negative_windows(rec, events_at({96}), 1, 7);
    REQUIRE(windows.size() == 1);
    CHECK(windows[0].center_index == 24);
}

TEST_CASE("negative sampling fails when not enough centers exist") {
    const Recording rec = ramp_recording(168);
    CHECK_THROWS_WITH(sample_negative_windows(rec, events_at({96}), 2, 7),
                      Catch::Matchers::StartsWith("cannot sample 2 negatives"));
}

TEST_CASE("negative windows never touch a spike neighborhood") {
    const Recording rec = noise_recording(20'000, 5, "n");
    const auto events = events_at({500, 3000, 3100, 10'000, 19'990});
    const auto windows = sample_negative_windows(rec, events, 200, 11);
    std::set<std::size_t> seen;
    for (const Window& w : windows) {
        CHECK(seen.insert(w.center_index).second);  // sampled without replacement
        const std::ptrdiff_t lo = static_cast<std::ptrdiff_t>(w.center_index) - 24;
        const std::ptrdiff_t hi = lo + 47;
        for (const SpikeEvent& e : events) {
            const std::ptrdiff_t zone_lo = static_cast<std::ptrdiff_t>(e.index) - 48;
            const std::ptrdiff_t zone_hi = static_cast<std::ptrdiff_t>(e.index) + 48;
            CHECK((hi < zone_lo || lo > zone_hi));
        }
    }
}

TEST_CASE("build_dataset balances classes and splits 80:20") {
    const Recording rec = noise_recording(24'000, 13, "r0");
    const auto events = events_at({1000, 2000, 4000, 6000, 8000, 10'000, 12'000, 14'000,
                                   16'000, 18'000});
    const LabeledDataset ds = build_dataset(std::vector<DetectedRecording>{{rec, events}},
                                            1.0, 42);
    const ClassCounts counts = ds.class_counts();
    CHECK(ds.train.size() == 16);
    CHECK(ds.validation.size() == 4);
    CHECK(counts.train_spike + counts.validation_spike == 10);
    CHECK(counts.train_no_spike + counts.validation_no_spike == 10);
}

TEST_CASE("build_dataset skips positives whose window would leave the recording") {
    const Recording rec = noise_recording(24'000, 13, "r0");
    const auto events = events_at({10, 1000, 2000, 23'990});  // first and last unusable
    const LabeledDataset ds = build_dataset(std::vector<DetectedRecording>{{rec, events}},
                                            1.0, 42);
    const ClassCounts counts = ds.class_counts();
    CHECK(counts.train_spike + counts.validation_spike == 2);
    CHECK(counts.train_no_spike + counts.validation_no_spike == 2);
}

TEST_CASE("build_dataset is deterministic in the split seed") {
    const Recording rec = noise_recording(24'000, 17, "r0");
    const auto events = events_at({1000, 3000, 5000, 7000, 9000});
    const std::vector<DetectedRecording> input{{rec, events}};
    const LabeledDataset a = build_dataset(input, 1.0, 7);
    const LabeledDataset b = build_dataset(input, 1.0, 7);
    REQUIRE(a.train.size() == b.train.size());
    for (std::size_t i = 0; i < a.train.size(); ++i) {
        CHECK(a.train[i].center_index == b.train[i].center_index);
        CHECK(a.train[i].values == b.train[i].values);
    }
}

TEST_CASE("splits partition the pool with no shared windows") {
    const Recording r0 = noise_recording(24'000, 19, "r0");
    const Recording r1 = noise_recording(24'000, 23, "r1");
    const auto events = events_at({1000, 3000, 5000, 7000, 9000, 11'000});
    const LabeledDataset ds =
        build_dataset(std::vector<DetectedRecording>{{r0, events}, {r1, events}}, 1.0, 3);
    std::set<std::pair<std::string, std::size_t>> keys;
    for (const Window& w : ds.train) CHECK(keys.insert({w.source_id, w.center_index}).second);
    for (const Window& w : ds.validation)
        CHECK(keys.insert({w.source_id, w.center_index}).second);
    CHECK(keys.size() == ds.train.size() + ds.validation.size());
}

TEST_CASE("positive windows align their peak sample") {
    const Recording rec = noise_recording(24'000, 29, "r0");
    const auto events = events_at({1000, 3000, 5000});
    const LabeledDataset ds = build_dataset(std::vector<DetectedRecording>{{rec, events}},
                                            1.0, 5);
    auto check_split = [&](const std::vector<Window>& split) {
        for (const Window& w : split)
            if (w.label == Label::spike)
                CHECK(w.values[24] == static_cast<float>(rec.samples[w.center_index]));
    };
    check_split(ds.train);
    check_split(ds.validation);
}

TEST_CASE("build_dataset requires a positive class") {
    const Recording rec = noise_recording(24'000, 31, "r0");
    CHECK_THROWS_WITH(build_dataset(std::vector<DetectedRecording>{{rec, {}}}, 1.0, 1),
                      "empty positive class");
}

TEST_CASE("build_dataset rejects duplicate recording ids") {
    const Recording rec = noise_recording(24'000, 37, "same");
    const auto events = events_at({1000});
    CHECK_THROWS(build_dataset(std::vector<DetectedRecording>{{rec, events}, {rec, events}},
                               1.0, 1));
}

namespace {

LabeledDataset hundred_window_dataset() {
    const Recording rec = noise_recording(60'000, 41, "r0");
    std::vector<SpikeEvent> events;
    for (std::size_t i = 0; i < 50; ++i) events.push_back({500 + 1000 * i, 5.0, Polarity::positive});
    LabeledDataset ds = build_dataset(std::vector<DetectedRecording>{{rec, events}}, 1.0, 13);
    // move everything into train to get a clean 100-window 50/50 split target
    for (Window& w : ds.validation) ds.train.push_back(std::move(w));
    ds.validation.clear();
    ds.validation.push_back(ds.train.back());
    ds.train.pop_back();
    ds.validation.push_back(ds.train.back());
    ds.train.pop_back();
    return ds;
}

}  // namespace

TEST_CASE("subset_training keeps fraction one identical") {
    const LabeledDataset ds = hundred_window_dataset();
    const LabeledDataset out = subset_training(ds, 1.0, 9);
    REQUIRE(out.train.size() == ds.train.size());
    for (std::size_t i = 0; i < out.train.size(); ++i)
        CHECK(out.train[i].center_index == ds.train[i].center_index);
}

TEST_CASE("subset_training halves a balanced split evenly") {
    LabeledDataset ds = hundred_window_dataset();
    REQUIRE(ds.train.size() == 98);
    const LabeledDataset out = subset_training(ds, 0.5, 9);
    CHECK(out.train.size() == 49);
    const ClassCounts counts = out.class_counts();
    CHECK(counts.train_spike >= 24);
    CHECK(counts.train_spike <= 25);
    CHECK(out.validation.size() == ds.validation.size());
}

TEST_CASE("subset_training keeps the label ratio within one window at any fraction") {
    const LabeledDataset ds = hundred_window_dataset();
    const ClassCounts full = ds.class_counts();
    const double ratio = static_cast<double>(full.train_spike) /
                         static_cast<double>(ds.train.size());
    for (double fraction : {0.1, 0.25, 0.33, 0.5, 0.66, 0.75, 0.9}) {
        const LabeledDataset out = subset_training(ds, fraction, 9);
        const ClassCounts counts = out.class_counts();
        const double ideal = ratio * static_cast<double>(out.train.size());
        CHECK(std::abs(static_cast<double>(counts.train_spike) - ideal) <= 1.0);
    }
}

TEST_CASE("smaller fractions are subsets of larger ones under the same seed") {
    const LabeledDataset ds = hundred_window_dataset();
    auto membership = [](const LabeledDataset& d) {
        std::set<std::size_t> m;
        for (const Window& w : d.train) m.insert(w.center_index);
        return m;
    };
    const auto m25 = membership(subset_training(ds, 0.25, 9));
    const auto m50 = membership(subset_training(ds, 0.50, 9));
    const auto m75 = membership(subset_training(ds, 0.75, 9));
    const auto m100 = membership(subset_training(ds, 1.0, 9));
    CHECK(std::includes(m50.begin(), m50.end(), m25.begin(), m25.end()));
    CHECK(std::includes(m75.begin(), m75.end(), m50.begin(), m50.end()));
    CHECK(std::includes(m100.begin(), m100.end(), m75.begin(), m75.end()));
}

TEST_CASE("subset_training leaves validation untouched") {
    const LabeledDataset ds = hundred_window_dataset();
    const LabeledDataset out = subset_training(ds, 0.25, 3);
    REQUIRE(out.validation.size() == ds.validation.size());
    for (std::size_t i = 0; i < out.validation.size(); ++i)
        CHECK(out.validation[i].center_index == ds.validation[i].center_index);
}

TEST_CASE("subset_training validates the fraction") {
    const LabeledDataset ds = hundred_window_dataset();
    CHECK_THROWS(subset_training(ds, 0.0, 1));
    CHECK_THROWS(subset_training(ds, 1.5, 1));
    CHECK_THROWS(subset_training(ds, -0.5, 1));
}

TEST_CASE("dataset files round-trip bit-exactly") {
    const LabeledDataset ds = hundred_window_dataset();
    const std::string path = temp_path("spikeforge_roundtrip.spkds");
    save_dataset(ds, path);
    const LabeledDataset back = load_dataset(path);
    REQUIRE(back.train.size() == ds.train.size());
    REQUIRE(back.validation.size() == ds.validation.size());
    CHECK(back.seed == ds.seed);
    for (std::size_t i = 0; i < ds.train.size(); ++i) {
        CHECK(back.train[i].values == ds.train[i].values);
        CHECK(back.train[i].label == ds.train[i].label);
        CHECK(back.train[i].source_id == ds.train[i].source_id);
        CHECK(back.train[i].center_index == ds.train[i].center_index);
    }
    std::remove(path.c_str());
}

TEST_CASE("truncated dataset files report the offending record") {
    const LabeledDataset ds = hundred_window_dataset();
    const std::string path = temp_path("spikeforge_truncated.spkds");
    save_dataset(ds, path);
    std::string bytes = read_file(path);
    bytes.resize(bytes.size() / 2);
    write_file(path, bytes);
    CHECK_THROWS_WITH(load_dataset(path), Catch::Matchers::ContainsSubstring("dataset record"));
    std::remove(path.c_str());
}

TEST_CASE("dataset loader refuses foreign magic and future versions") {
    const LabeledDataset ds = hundred_window_dataset();
    const std::string path = temp_path("spikeforge_version.spkds");
    save_dataset(ds, path);
    std::string bytes = read_file(path);
    std::string wrong_magic = bytes;
    wrong_magic[0] = 'X';
    write_file(path, wrong_magic);
    CHECK_THROWS_WITH(load_dataset(path), Catch::Matchers::ContainsSubstring("not a dataset"));
    std::string wrong_version = bytes;
    wrong_version[8] = 2;  // little-endian version field
    write_file(path, wrong_version);
    CHECK_THROWS_WITH(load_dataset(path),
                      Catch::Matchers::ContainsSubstring("unsupported dataset version"));
    std::remove(path.c_str());
}
