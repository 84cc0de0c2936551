#include <catch2/catch_amalgamated.hpp>

#include <spikeforge/dataset.hpp>
#include <spikeforge/detect.hpp>
#include <spikeforge/synth.hpp>
#include <spikeforge/train.hpp>

#include <filesystem>

using namespace spikeforge;
using Catch::Approx;

namespace {

// Two short synthetic recordings, detected and windowed; ~40 windows total.
LabeledDataset small_dataset() {
    std::vector<DetectedRecording> detected;
    SynthConfig scfg;
    scfg.duration_s = 0.5;
    scfg.firing_rate_hz = 20.0;
    for (std::uint64_t seed : {101ULL, 202ULL}) {
        scfg.seed = seed;
        auto [rec, truth] = generate_recording(scfg);
        auto events = detect_spikes(rec, {});
        detected.push_back({std::move(rec), std::move(events)});
    }
    return build_dataset(detected, 1.0, 11);
}

ModelConfig tiny_model(std::uint64_t seed) {
    ModelConfig cfg;
    cfg.num_blocks = 2;
    cfg.hidden_channels = 4;
    cfg.seed = seed;
    return cfg;
}

TrainConfig quick_train(std::size_t epochs) {
    TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.batch_size = 8;
    cfg.shuffle_seed = 5;
    return cfg;
}

}  // namespace

TEST_CASE("zero epochs trains nothing and leaves the model untouched") {
    const LabeledDataset ds = small_dataset();
    SpikeClassifier model(tiny_model(1));
    std::vector<std::vector<double>> before;
    for (const auto* p : model.param_tensors()) before.push_back(*p);
    const auto results = train(model, ds, quick_train(0));
    CHECK(results.empty());
    std::size_t j = 0;
    for (const auto* p : model.param_tensors()) CHECK(*p == before[j++]);
}

TEST_CASE("training requires nonempty splits") {
    LabeledDataset ds = small_dataset();
    ds.validation.clear();
    SpikeClassifier model(tiny_model(1));
    CHECK_THROWS(train(model, ds, quick_train(1)));
}

TEST_CASE("identical seeds give bit-identical checkpoint sequences") {
    const LabeledDataset ds = small_dataset();
    SpikeClassifier a(tiny_model(3));
    SpikeClassifier b(tiny_model(3));
    const auto ra = train(a, ds, quick_train(3));
    const auto rb = train(b, ds, quick_train(3));
    REQUIRE(ra.size() == 3);
    REQUIRE(rb.size() == 3);
    for (std::size_t e = 0; e < 3; ++e) {
        const bool identical =
            serialize_checkpoint(ra[e].checkpoint) == serialize_checkpoint(rb[e].checkpoint);
        CHECK(identical);
    }
}

TEST_CASE("per-epoch results carry epoch numbers, metrics, and checkpoints") {
    const LabeledDataset ds = small_dataset();
    SpikeClassifier model(tiny_model(7));
    const auto results = train(model, ds, quick_train(2));
    REQUIRE(results.size() == 2);
    CHECK(results[0].epoch == 1);
    CHECK(results[1].epoch == 2);
    for (const auto& r : results) {
        CHECK(r.validation.confusion.total() == ds.validation.size());
        CHECK(r.checkpoint.epoch == r.epoch);
        CHECK(r.checkpoint.metrics.accuracy == r.validation.accuracy);
        CHECK(std::isfinite(r.mean_train_loss));
    }
}

TEST_CASE("resuming from a checkpoint reproduces the uninterrupted run") {
    const LabeledDataset ds = small_dataset();
    SpikeClassifier full(tiny_model(9));
    const auto full_run = train(full, ds, quick_train(4));

    SpikeClassifier half(tiny_model(9));
    const auto half_run = train(half, ds, quick_train(2));
    const auto resumed = resume_training(half_run.back().checkpoint, ds, quick_train(4));

    REQUIRE(resumed.size() == 2);
    CHECK(resumed[0].epoch == 3);
    CHECK(serialize_checkpoint(resumed[0].checkpoint) ==
          serialize_checkpoint(full_run[2].checkpoint));
    CHECK(serialize_checkpoint(resumed[1].checkpoint) ==
          serialize_checkpoint(full_run[3].checkpoint));
}

TEST_CASE("resume past the final epoch is a no-op") {
    const LabeledDataset ds = small_dataset();
    SpikeClassifier model(tiny_model(9));
    const auto run = train(model, ds, quick_train(2));
    CHECK(resume_training(run.back().checkpoint, ds, quick_train(2)).empty());
}

TEST_CASE("checkpoint files appear per epoch when a directory is set") {
    const LabeledDataset ds = small_dataset();
    const auto dir = std::filesystem::temp_directory_path() / "spikeforge_ckpt_test";
    std::filesystem::remove_all(dir);
    TrainConfig cfg = quick_train(2);
    cfg.checkpoint_dir = dir.string();
    SpikeClassifier model(tiny_model(13));
    const auto results = train(model, ds, cfg);
    for (const auto& r : results) {
        CHECK_FALSE(r.checkpoint_path.empty());
        CHECK(std::filesystem::exists(r.checkpoint_path));
        const Checkpoint loaded = load_checkpoint(r.checkpoint_path);
        CHECK(serialize_checkpoint(loaded) == serialize_checkpoint(r.checkpoint));
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("best epoch picks the highest accuracy and breaks ties early") {
    std::vector<EpochResult> results(3);
    results[0].epoch = 1;
    results[0].validation.accuracy = 0.8;
    results[1].epoch = 2;
    results[1].validation.accuracy = 0.9;
    results[2].epoch = 3;
    results[2].validation.accuracy = 0.9;
    CHECK(best_epoch(results).epoch == 2);
}

TEST_CASE("training loss drops from the first epoch to the best epoch") {
    const LabeledDataset ds = small_dataset();
    SpikeClassifier model(tiny_model(17));
    TrainConfig cfg = quick_train(6);
    const auto results = train(model, ds, cfg);
    const EpochResult& best = best_epoch(results);
    if (best.epoch > 1) CHECK(best.mean_train_loss < results[0].mean_train_loss);
}

TEST_CASE("block experiment emits one row per block count") {
    const LabeledDataset ds = small_dataset();
    const std::vector<std::size_t> counts{1, 2};
    const auto table =
        run_block_experiment(ds, counts, tiny_model(19), quick_train(2));
    REQUIRE(table.size() == 2);
    CHECK(table[0].num_blocks == 1);
    CHECK(table[1].num_blocks == 2);
    for (const auto& row : table) {
        CHECK(row.mean_accuracy >= 0.0);
        CHECK(row.mean_accuracy <= 1.0);
    }
}

TEST_CASE("fraction experiment reports best-epoch metrics per fraction") {
    const LabeledDataset ds = small_dataset();
    const std::vector<double> fractions{0.5, 1.0};
    const auto table =
        run_fraction_experiment(ds, fractions, 23, tiny_model(19), quick_train(2));
    REQUIRE(table.size() == 2);
    CHECK(table[0].fraction == 0.5);
    CHECK(table[1].fraction == 1.0);
    for (const auto& row : table) {
        CHECK(row.best_epoch >= 1);
        CHECK(row.accuracy >= 0.0);
        CHECK(row.accuracy <= 1.0);
        CHECK(row.auc >= 0.0);
        CHECK(row.auc <= 1.0);
    }
}
