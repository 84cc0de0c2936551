// spikeforge command-line tool: synthesize recordings, detect spikes, build
// window datasets, train and evaluate the classifier, and run the block /
// data-fraction experiments. All outputs are deterministic for fixed flags;
// exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <spikeforge/spikeforge.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace sf = spikeforge;
namespace fs = std::filesystem;

namespace {

int g_log_level = 1;  // 0 quiet, 1 info, 2 debug

template <typename... Args>
void log_info(const char* fmt, Args... args) {
    if (g_log_level >= 1) {
        std::fprintf(stderr, fmt, args...);
        std::fprintf(stderr, "\n");
    }
}

template <typename... Args>
void log_debug(const char* fmt, Args... args) {
    if (g_log_level >= 2) {
        std::fprintf(stderr, fmt, args...);
        std::fprintf(stderr, "\n");
    }
}

std::string format_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

nlohmann::json metrics_json(const sf::MetricsReport& r) {
    return {{"format", "spikeforge.metrics"},
            {"version", 1},
            {"accuracy", r.accuracy},
            {"precision", r.precision},
            {"recall", r.recall},
            {"f1", r.f1},
            {"auc", r.auc},
            {"confusion",
             {{"tp", r.confusion.tp},
              {"tn", r.confusion.tn},
              {"fp", r.confusion.fp},
              {"fn", r.confusion.fn}}},
            {"num_examples", r.confusion.total()}};
}

void write_json(const nlohmann::json& j, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
}

void write_roc_csv(const std::vector<sf::RocPoint>& roc, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "fpr,tpr,threshold\n";
    for (const sf::RocPoint& p : roc)
        out << format_double(p.fpr) << ',' << format_double(p.tpr) << ','
            << format_double(p.threshold) << '\n';
}

struct DetectionFlags {
    double threshold_multiplier = 4.0;
    std::size_t box_width = 5;
    std::size_t min_distance = 24;
    double max_amplitude = 0.0;  // 0 = disabled

    void attach(CLI::App* cmd) {
        cmd->add_option("--threshold-multiplier", threshold_multiplier,
                        "Detection threshold as a multiple of the renormalized trace sd")
            ->capture_default_str();
        cmd->add_option("--box-width", box_width, "Box filter width in samples (odd)")
            ->capture_default_str();
        cmd->add_option("--min-distance", min_distance,
                        "Minimum distance between spikes in samples")
            ->capture_default_str();
        cmd->add_option("--max-amplitude", max_amplitude,
                        "Drop events above this rectified amplitude (0 disables)")
            ->capture_default_str();
    }

    sf::DetectionConfig config() const {
        sf::DetectionConfig cfg;
        cfg.threshold_multiplier = threshold_multiplier;
        cfg.box_width = box_width;
        cfg.min_spike_distance = min_distance;
        if (max_amplitude > 0.0) cfg.max_amplitude = max_amplitude;
        cfg.validate();
        return cfg;
    }
};

struct TrainFlags {
    std::size_t epochs = 15;
    double learning_rate = 0.001;
    std::size_t batch_size = 32;
    std::size_t blocks = 6;
    std::size_t hidden = 16;
    std::size_t kernel = 3;
    double dropout = 0.1;
    double leaky_slope = 0.01;

    void attach(CLI::App* cmd) {
        cmd->add_option("--epochs", epochs, "Training epochs")->capture_default_str();
        cmd->add_option("--lr", learning_rate, "Adam learning rate")->capture_default_str();
        cmd->add_option("--batch-size", batch_size, "Mini-batch size")->capture_default_str();
        cmd->add_option("--blocks", blocks, "Number of dropout/conv/LeakyReLU blocks")
            ->capture_default_str();
        cmd->add_option("--hidden", hidden, "Hidden channel count")->capture_default_str();
        cmd->add_option("--kernel", kernel, "Convolution kernel size (odd)")
            ->capture_default_str();
        cmd->add_option("--dropout", dropout, "Dropout probability")->capture_default_str();
        cmd->add_option("--leaky-slope", leaky_slope, "Leaky ReLU negative slope")
            ->capture_default_str();
    }

    sf::ModelConfig model_config(std::uint64_t seed) const {
        sf::ModelConfig cfg;
        cfg.num_blocks = blocks;
        cfg.hidden_channels = hidden;
        cfg.kernel_size = kernel;
        cfg.dropout_p = dropout;
        cfg.leaky_slope = leaky_slope;
        cfg.seed = seed;
        cfg.validate();
        return cfg;
    }

    sf::TrainConfig train_config(std::uint64_t seed) const {
        sf::TrainConfig cfg;
        cfg.epochs = epochs;
        cfg.learning_rate = learning_rate;
        cfg.batch_size = batch_size;
        std::uint64_t stream = seed;
        cfg.shuffle_seed = sf::splitmix64(stream);  // decorrelated from the model seed
        cfg.validate();
        return cfg;
    }
};

std::string percent_label(double fraction) {
    return std::to_string(static_cast<long long>(std::llround(fraction * 100.0))) + "%";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spike detection toolkit for extracellular microelectrode recordings"};
    app.require_subcommand(1);

    std::uint64_t seed = 42;
    std::string out_dir = ".";
    std::string log_level = "info";
    app.add_option("--seed", seed, "Global seed (env SPIKEFORGE_SEED)")
        ->envname("SPIKEFORGE_SEED")
        ->capture_default_str();
    app.add_option("--out-dir", out_dir, "Directory for default output paths")
        ->capture_default_str();
    app.add_option("--log-level", log_level, "quiet, info, or debug")
        ->check(CLI::IsMember({"quiet", "info", "debug"}))
        ->capture_default_str();

    // --- synth ---------------------------------------------------------------
    auto* synth = app.add_subcommand("synth", "Generate a synthetic recording + ground truth");
    double duration = 4.0;
    std::uint32_t rate = 24000;
    double noise_sd = 1.0, firing_rate = 10.0;
    double amplitude_low = 6.0, amplitude_high = 10.0;
    double template_width_ms = 1.0, refractory_ms = 2.0;
    std::string synth_out;
    synth->add_option("--duration", duration, "Recording length in seconds")
        ->capture_default_str();
    synth->add_option("--rate", rate, "Sample rate in Hz")->capture_default_str();
    synth->add_option("--noise-sd", noise_sd, "Background noise sd")->capture_default_str();
    synth->add_option("--firing-rate", firing_rate, "Spike rate in Hz")->capture_default_str();
    synth->add_option("--amplitude-low", amplitude_low, "Lowest spike peak, in noise sds")
        ->capture_default_str();
    synth->add_option("--amplitude-high", amplitude_high, "Highest spike peak, in noise sds")
        ->capture_default_str();
    synth->add_option("--template-width-ms", template_width_ms, "Spike template width")
        ->capture_default_str();
    synth->add_option("--refractory-ms", refractory_ms, "Minimum gap between spikes")
        ->capture_default_str();
    synth->add_option("--out", synth_out, "Recording path (.csv or .f32)")->required();

    // --- detect --------------------------------------------------------------
    auto* detect = app.add_subcommand("detect", "Detect spikes in a recording");
    std::string detect_input, detect_out, detect_truth;
    std::size_t match_tolerance = 6;
    DetectionFlags detect_flags;
    detect->add_option("--input", detect_input, "Recording path (.csv or .f32)")
        ->required()
        ->check(CLI::ExistingFile);
    detect_flags.attach(detect);
    detect->add_option("--out", detect_out, "Events CSV path")->required();
    detect->add_option("--truth", detect_truth, "Ground-truth CSV for recall/precision")
        ->check(CLI::ExistingFile);
    detect->add_option("--match-tolerance", match_tolerance,
                       "Truth matching tolerance in samples")
        ->capture_default_str();

    // --- build-dataset ---------------------------------------------------------
    auto* build = app.add_subcommand("build-dataset",
                                     "Detect spikes and build a labeled window dataset");
    std::vector<std::string> build_inputs;
    double negatives_ratio = 1.0;
    std::string build_out;
    DetectionFlags build_flags;
    build->add_option("recordings", build_inputs, "Recording paths")
        ->required()
        ->check(CLI::ExistingFile);
    build_flags.attach(build);
    build->add_option("--negatives-ratio", negatives_ratio, "Negatives per positive window")
        ->capture_default_str();
    build->add_option("--out", build_out, "Dataset path (.spkds)")->required();

    // --- train -----------------------------------------------------------------
    auto* train_cmd = app.add_subcommand("train", "Train the classifier on a dataset");
    std::string train_dataset, checkpoint_dir;
    TrainFlags train_flags;
    train_cmd->add_option("--dataset", train_dataset, "Dataset path (.spkds)")
        ->required()
        ->check(CLI::ExistingFile);
    train_flags.attach(train_cmd);
    train_cmd->add_option("--checkpoint-dir", checkpoint_dir,
                          "Directory for per-epoch checkpoints and metrics "
                          "(default <out-dir>/checkpoints)");

    // --- eval ------------------------------------------------------------------
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset split");
    std::string eval_checkpoint, eval_dataset, eval_split = "validation";
    std::string out_metrics, out_roc;
    eval_cmd->add_option("--checkpoint", eval_checkpoint, "Checkpoint path")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--dataset", eval_dataset, "Dataset path (.spkds)")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--split", eval_split, "validation or train")
        ->check(CLI::IsMember({"validation", "train"}))
        ->capture_default_str();
    eval_cmd->add_option("--out-metrics", out_metrics,
                         "Metrics JSON path (default <out-dir>/metrics.json)");
    eval_cmd->add_option("--out-roc", out_roc, "ROC CSV path (default <out-dir>/roc.csv)");

    // --- experiment --------------------------------------------------------------
    auto* experiment = app.add_subcommand("experiment", "Run a comparison experiment");
    experiment->require_subcommand(1);

    auto* exp_blocks = experiment->add_subcommand("blocks", "Accuracy vs block count");
    std::string blocks_dataset, blocks_out;
    std::vector<std::size_t> block_counts{1, 3, 6, 9, 12};
    TrainFlags blocks_train_flags;
    exp_blocks->add_option("--dataset", blocks_dataset, "Dataset path")
        ->required()
        ->check(CLI::ExistingFile);
    exp_blocks->add_option("--block-counts", block_counts, "Block counts to compare")
        ->delimiter(',')
        ->capture_default_str();
    blocks_train_flags.attach(exp_blocks);
    exp_blocks->add_option("--out", blocks_out, "CSV path (default <out-dir>/blocks.csv)");

    auto* exp_fractions =
        experiment->add_subcommand("fractions", "Best metrics vs training-data fraction");
    std::string fractions_dataset, fractions_out;
    std::vector<double> fractions{0.25, 0.5, 0.75, 1.0};
    std::uint64_t subset_seed = 0;
    bool subset_seed_set = false;
    TrainFlags fractions_train_flags;
    exp_fractions->add_option("--dataset", fractions_dataset, "Dataset path")
        ->required()
        ->check(CLI::ExistingFile);
    exp_fractions->add_option("--fractions", fractions, "Training-data fractions")
        ->delimiter(',')
        ->capture_default_str();
    exp_fractions
        ->add_option_function<std::uint64_t>(
            "--subset-seed",
            [&](std::uint64_t v) {
                subset_seed = v;
                subset_seed_set = true;
            },
            "Seed for the nested subset order (default: global seed)");
    fractions_train_flags.attach(exp_fractions);
    exp_fractions->add_option("--out", fractions_out,
                              "CSV path (default <out-dir>/fractions.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (log_level == "quiet") g_log_level = 0;
    if (log_level == "debug") g_log_level = 2;

    try {
        if (*synth) {
            sf::SynthConfig cfg;
            cfg.duration_s = duration;
            cfg.sample_rate_hz = rate;
            cfg.noise_sd = noise_sd;
            cfg.firing_rate_hz = firing_rate;
            cfg.amplitude_low = amplitude_low;
            cfg.amplitude_high = amplitude_high;
            cfg.template_width_ms = template_width_ms;
            cfg.refractory_ms = refractory_ms;
            cfg.seed = seed;
            const auto [rec, truth] = sf::generate_recording(cfg);
            sf::save_recording(rec, synth_out);
            const std::string truth_path =
                fs::path(synth_out).replace_extension(".truth.csv").string();
            sf::save_truth_csv(truth, truth_path);
            log_info("wrote %zu samples to %s (%zu spikes, truth in %s)", rec.samples.size(),
                     synth_out.c_str(), truth.spike_indices.size(), truth_path.c_str());
        } else if (*detect) {
            const sf::Recording rec = sf::load_recording(detect_input);
            const auto events = sf::detect_spikes(rec, detect_flags.config());
            sf::save_events_csv(events, rec.sample_rate_hz, detect_out);
            log_info("detected %zu events in %s", events.size(), detect_input.c_str());
            if (!detect_truth.empty()) {
                const sf::GroundTruth truth = sf::load_truth_csv(detect_truth);
                std::vector<bool> used(truth.spike_indices.size(), false);
                std::size_t tp = 0;
                for (const auto& e : events) {
                    for (std::size_t i = 0; i < truth.spike_indices.size(); ++i) {
                        const std::size_t t = truth.spike_indices[i];
                        const std::size_t gap = e.index > t ? e.index - t : t - e.index;
                        if (!used[i] && gap <= match_tolerance) {
                            used[i] = true;
                            ++tp;
                            break;
                        }
                    }
                }
                const std::size_t fp = events.size() - tp;
                const std::size_t fn = truth.spike_indices.size() - tp;
                const double recall =
                    tp + fn == 0 ? 0.0 : double(tp) / double(tp + fn);
                const double precision =
                    tp + fp == 0 ? 0.0 : double(tp) / double(tp + fp);
                log_info("vs truth: recall=%.4f precision=%.4f (tp=%zu fp=%zu fn=%zu)",
                         recall, precision, tp, fp, fn);
            }
        } else if (*build) {
            std::vector<sf::DetectedRecording> detected;
            const sf::DetectionConfig cfg = build_flags.config();
            for (const std::string& path : build_inputs) {
                sf::Recording rec = sf::load_recording(path);
                auto events = sf::detect_spikes(rec, cfg);
                log_info("%s: %zu events", path.c_str(), events.size());
                detected.push_back({std::move(rec), std::move(events)});
            }
            const sf::LabeledDataset ds = sf::build_dataset(detected, negatives_ratio, seed);
            sf::save_dataset(ds, build_out);
            const sf::ClassCounts c = ds.class_counts();
            log_info("dataset %s: train %zu (%zu/%zu), validation %zu (%zu/%zu)",
                     build_out.c_str(), ds.train.size(), c.train_spike, c.train_no_spike,
                     ds.validation.size(), c.validation_spike, c.validation_no_spike);
        } else if (*train_cmd) {
            const sf::LabeledDataset ds = sf::load_dataset(train_dataset);
            sf::TrainConfig tcfg = train_flags.train_config(seed);
            tcfg.checkpoint_dir = checkpoint_dir.empty()
                                      ? (fs::path(out_dir) / "checkpoints").string()
                                      : checkpoint_dir;
            sf::SpikeClassifier model(train_flags.model_config(seed));
            log_debug("model parameters: %zu", model.param_count());
            const auto results = sf::train(model, ds, tcfg);
            for (const auto& r : results) {
                nlohmann::json j = metrics_json(r.validation);
                j["epoch"] = r.epoch;
                j["mean_train_loss"] = r.mean_train_loss;
                const fs::path metrics_path =
                    fs::path(tcfg.checkpoint_dir) /
                    ("epoch_" + std::string(r.epoch < 10 ? "0" : "") +
                     std::to_string(r.epoch) + ".metrics.json");
                write_json(j, metrics_path.string());
                log_info("epoch %2u: loss %.4f acc %.4f auc %.4f", r.epoch, r.mean_train_loss,
                         r.validation.accuracy, r.validation.auc);
            }
            const auto& best = sf::best_epoch(results);
            std::printf("best epoch %u: accuracy %.4f precision %.4f recall %.4f f1 %.4f auc %.4f\n",
                        best.epoch, best.validation.accuracy, best.validation.precision,
                        best.validation.recall, best.validation.f1, best.validation.auc);
        } else if (*eval_cmd) {
            const sf::Checkpoint ckpt = sf::load_checkpoint(eval_checkpoint);
            const sf::SpikeClassifier model = sf::model_from_checkpoint(ckpt);
            const sf::LabeledDataset ds = sf::load_dataset(eval_dataset);
            const auto& split = eval_split == "train" ? ds.train : ds.validation;
            const sf::MetricsReport report = sf::evaluate(model, split);
            const std::string metrics_path =
                out_metrics.empty() ? (fs::path(out_dir) / "metrics.json").string()
                                    : out_metrics;
            const std::string roc_path =
                out_roc.empty() ? (fs::path(out_dir) / "roc.csv").string() : out_roc;
            write_json(metrics_json(report), metrics_path);
            write_roc_csv(report.roc, roc_path);
            std::printf("accuracy %.4f precision %.4f recall %.4f f1 %.4f auc %.4f\n",
                        report.accuracy, report.precision, report.recall, report.f1,
                        report.auc);
        } else if (*exp_blocks) {
            const sf::LabeledDataset ds = sf::load_dataset(blocks_dataset);
            const auto table = sf::run_block_experiment(
                ds, block_counts, blocks_train_flags.model_config(seed),
                blocks_train_flags.train_config(seed));
            const std::string path = blocks_out.empty()
                                         ? (fs::path(out_dir) / "blocks.csv").string()
                                         : blocks_out;
            std::ofstream out(path, std::ios::trunc);
            if (!out) throw std::runtime_error("cannot open for writing: " + path);
            out << "blocks,mean_accuracy\n";
            for (const auto& row : table) {
                out << row.num_blocks << ',' << format_double(row.mean_accuracy) << '\n';
                log_info("blocks %2zu: mean accuracy %.4f", row.num_blocks, row.mean_accuracy);
            }
        } else if (*exp_fractions) {
            const sf::LabeledDataset ds = sf::load_dataset(fractions_dataset);
            const auto table = sf::run_fraction_experiment(
                ds, fractions, subset_seed_set ? subset_seed : seed,
                fractions_train_flags.model_config(seed),
                fractions_train_flags.train_config(seed));
            const std::string path = fractions_out.empty()
                                         ? (fs::path(out_dir) / "fractions.csv").string()
                                         : fractions_out;
            std::ofstream out(path, std::ios::trunc);
            if (!out) throw std::runtime_error("cannot open for writing: " + path);
            out << "metric";
            for (const auto& row : table) out << ',' << percent_label(row.fraction);
            out << '\n';
            const char* names[4] = {"accuracy", "precision", "recall", "f1"};
            for (int metric = 0; metric < 4; ++metric) {
                out << names[metric];
                for (const auto& row : table) {
                    const double v = metric == 0   ? row.accuracy
                                     : metric == 1 ? row.precision
                                     : metric == 2 ? row.recall
                                                   : row.f1;
                    out << ',' << format_double(v);
                }
                out << '\n';
            }
            for (const auto& row : table)
                log_info("fraction %s: best epoch %u accuracy %.4f",
                         percent_label(row.fraction).c_str(), row.best_epoch, row.accuracy);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
