#pragma once

// Mini-batch training with Adam and binary cross-entropy. Each epoch
// shuffles the training split, averages per-example gradients over every
// batch, applies one Adam step per batch, then evaluates the validation
// split and snapshots a checkpoint. A single RNG drives shuffling and
// dropout and is serialized into every checkpoint, so a resumed run is
// bit-identical to an uninterrupted one.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spikeforge/adam.hpp"
#include "spikeforge/checkpoint.hpp"
#include "spikeforge/dataset.hpp"
#include "spikeforge/metrics.hpp"
#include "spikeforge/model.hpp"
#include "spikeforge/rng.hpp"

namespace spikeforge {

struct TrainConfig {
    std::size_t epochs = 15;
    double learning_rate = 0.001;
    std::size_t batch_size = 32;
    std::uint64_t shuffle_seed = 0;
    std::string checkpoint_dir;  // empty: keep checkpoints in memory only

    void validate() const {
        if (learning_rate <= 0.0) throw std::invalid_argument("learning_rate must be positive");
        if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    }
};

struct EpochResult {
    std::uint32_t epoch = 0;  // 1-based
    Checkpoint checkpoint;
    MetricsReport validation;
    double mean_train_loss = 0.0;
    std::string checkpoint_path;  // empty when not written to disk
};

inline MetricsSnapshot snapshot_from_report(const MetricsReport& r) {
    return {r.accuracy, r.precision, r.recall, r.f1,          r.auc,
            r.confusion.tp, r.confusion.tn, r.confusion.fp, r.confusion.fn};
}

namespace detail {

inline std::string checkpoint_filename(std::uint32_t epoch) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "epoch_%02u.ckpt", epoch);
    return buf;
}

inline std::vector<EpochResult> run_epochs(SpikeClassifier& model, AdamState& adam, Rng& rng,
                                           std::uint32_t first_epoch,
                                           const LabeledDataset& dataset,
                                           const TrainConfig& config) {
    config.validate();
    if (dataset.train.empty() || dataset.validation.empty())
        throw std::invalid_argument("train and validation splits must be nonempty");
    if (!config.checkpoint_dir.empty())
        std::filesystem::create_directories(config.checkpoint_dir);

    auto params = model.param_tensors();
    std::vector<EpochResult> results;
    std::vector<std::size_t> order(dataset.train.size());

    for (std::uint32_t epoch = first_epoch; epoch <= config.epochs; ++epoch) {
        // identity order reshuffled per epoch, so the permutation depends only
        // on the rng state at epoch entry and resumed runs replay exactly
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        rng.shuffle(order);
        double loss_sum = 0.0;
        GradSet grads = model.make_grad_set();
        for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
            const std::size_t end = std::min(order.size(), begin + config.batch_size);
            for (auto& g : grads) std::fill(g.begin(), g.end(), 0.0);
            for (std::size_t i = begin; i < end; ++i) {
                const Window& w = dataset.train[order[i]];
                loss_sum += model.train_example(w.values, one_hot(w.label), rng, grads).first;
            }
            const double scale = 1.0 / static_cast<double>(end - begin);
            for (auto& g : grads)
                for (double& v : g) v *= scale;
            adam_step(params, grads, adam, config.learning_rate);
        }

        EpochResult r;
        r.epoch = epoch;
        r.mean_train_loss = loss_sum / static_cast<double>(order.size());
        r.validation = evaluate(model, dataset.validation);
        r.checkpoint =
            make_checkpoint(model, adam, epoch, rng, snapshot_from_report(r.validation));
        if (!config.checkpoint_dir.empty()) {
            const std::filesystem::path path =
                std::filesystem::path(config.checkpoint_dir) / checkpoint_filename(epoch);
            save_checkpoint(r.checkpoint, path.string());
            r.checkpoint_path = path.string();
        }
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace detail

// Trains in place for config.epochs epochs; returns one result per epoch.
inline std::vector<EpochResult> train(SpikeClassifier& model, const LabeledDataset& dataset,
                                      const TrainConfig& config) {
    config.validate();
    if (config.epochs == 0) return {};
    AdamState adam = AdamState::for_params(model.param_tensors());
    Rng rng(config.shuffle_seed);
    return detail::run_epochs(model, adam, rng, 1, dataset, config);
}

// Continues a checkpointed run through the remaining epochs. With the same
// dataset and config this reproduces the uninterrupted run exactly.
inline std::vector<EpochResult> resume_training(const Checkpoint& checkpoint,
                                                const LabeledDataset& dataset,
                                                const TrainConfig& config,
                                                SpikeClassifier* model_out = nullptr) {
    config.validate();
    SpikeClassifier model = model_from_checkpoint(checkpoint);
    AdamState adam = checkpoint.adam;
    Rng rng = Rng::from_state(checkpoint.rng_state);
    std::vector<EpochResult> results;
    if (checkpoint.epoch < config.epochs)
        results = detail::run_epochs(model, adam, rng, checkpoint.epoch + 1, dataset, config);
    if (model_out) *model_out = std::move(model);
    return results;
}

// Highest validation accuracy; ties go to the earliest epoch.
inline const EpochResult& best_epoch(std::span<const EpochResult> results) {
    if (results.empty()) throw std::invalid_argument("no epochs to choose from");
    const EpochResult* best = &results[0];
    for (const EpochResult& r : results)
        if (r.validation.accuracy > best->validation.accuracy) best = &r;
    return *best;
}

// --- experiment drivers -------------------------------------------------------

struct BlockExperimentRow {
    std::size_t num_blocks = 0;
    double mean_accuracy = 0.0;  // mean of per-epoch validation accuracies
};

inline std::vector<BlockExperimentRow> run_block_experiment(
    const LabeledDataset& dataset, std::span<const std::size_t> block_counts,
    ModelConfig model_config, TrainConfig train_config) {
    train_config.checkpoint_dir.clear();
    std::vector<BlockExperimentRow> table;
    for (std::size_t blocks : block_counts) {
        model_config.num_blocks = blocks;
        SpikeClassifier model(model_config);
        const std::vector<EpochResult> results = train(model, dataset, train_config);
        double sum = 0.0;
        for (const EpochResult& r : results) sum += r.validation.accuracy;
        table.push_back({blocks, results.empty() ? 0.0 : sum / static_cast<double>(results.size())});
    }
    return table;
}

struct FractionExperimentRow {
    double fraction = 0.0;
    std::uint32_t best_epoch = 0;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double auc = 0.0;
};

inline std::vector<FractionExperimentRow> run_fraction_experiment(
    const LabeledDataset& dataset, std::span<const double> fractions, std::uint64_t subset_seed,
    const ModelConfig& model_config, TrainConfig train_config) {
    train_config.checkpoint_dir.clear();
    std::vector<FractionExperimentRow> table;
    for (double fraction : fractions) {
        const LabeledDataset subset = subset_training(dataset, fraction, subset_seed);
        SpikeClassifier model(model_config);
        const std::vector<EpochResult> results = train(model, subset, train_config);
        const EpochResult& best = best_epoch(results);
        table.push_back({fraction, best.epoch, best.validation.accuracy,
                         best.validation.precision, best.validation.recall, best.validation.f1,
                         best.validation.auc});
    }
    return table;
}

}  // namespace spikeforge
