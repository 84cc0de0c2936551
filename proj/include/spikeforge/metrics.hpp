#pragma once

// Binary-classification evaluation: confusion matrix, accuracy / precision /
// recall / F1, ROC curve over the spike-class score, and trapezoidal AUC.
// The positive class is `spike` throughout.

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "spikeforge/dataset.hpp"
#include "spikeforge/model.hpp"

namespace spikeforge {

struct ConfusionMatrix {
    std::uint64_t tp = 0, tn = 0, fp = 0, fn = 0;

    std::uint64_t total() const { return tp + tn + fp + fn; }

    void count(Label truth, Label predicted) {
        if (truth == Label::spike)
            (predicted == Label::spike ? tp : fn)++;
        else
            (predicted == Label::spike ? fp : tn)++;
    }
};

struct Metrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Zero denominators follow the documented conventions: precision = 0 when no
// positive predictions, recall = 0 when no positive examples, f1 = 0 when
// precision + recall = 0.
inline Metrics metrics_from_confusion(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw std::invalid_argument("empty confusion matrix");
    Metrics m;
    m.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
    m.precision =
        cm.tp + cm.fp == 0 ? 0.0 : static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
    m.recall =
        cm.tp + cm.fn == 0 ? 0.0 : static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
    m.f1 = m.precision + m.recall == 0.0
               ? 0.0
               : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    double threshold = 0.0;  // score at/above which examples are called spikes
};

// Threshold sweep over the distinct scores in descending order, ties grouped
// into a single step; starts at (0,0) and ends at (1,1).
inline std::vector<RocPoint> roc_curve(std::span<const double> scores,
                                       std::span<const Label> labels) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("roc: score/label count mismatch");
    std::uint64_t positives = 0, negatives = 0;
    for (Label l : labels) (l == Label::spike ? positives : negatives)++;
    if (positives == 0 || negatives == 0)
        throw std::invalid_argument("roc requires both classes present");

    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    std::vector<RocPoint> curve;
    curve.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
    std::uint64_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < order.size();) {
        const double threshold = scores[order[i]];
        for (; i < order.size() && scores[order[i]] == threshold; ++i)
            (labels[order[i]] == Label::spike ? tp : fp)++;
        curve.push_back({static_cast<double>(fp) / static_cast<double>(negatives),
                         static_cast<double>(tp) / static_cast<double>(positives), threshold});
    }
    return curve;
}

// Trapezoidal integral of tpr over fpr.
inline double auc(std::span<const RocPoint> curve) {
    if (curve.size() < 2) throw std::invalid_argument("auc needs at least 2 roc points");
    double area = 0.0;
    for (std::size_t i = 1; i < curve.size(); ++i)
        area += (curve[i].fpr - curve[i - 1].fpr) * (curve[i].tpr + curve[i - 1].tpr) / 2.0;
    return area;
}

struct MetricsReport {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    ConfusionMatrix confusion;
    std::vector<RocPoint> roc;
    double auc = 0.0;
};

inline MetricsReport evaluate(const SpikeClassifier& model, std::span<const Window> windows) {
    if (windows.empty()) throw std::invalid_argument("empty evaluation set");
    MetricsReport report;
    std::vector<double> spike_scores;
    std::vector<Label> labels;
    spike_scores.reserve(windows.size());
    labels.reserve(windows.size());
    for (const Window& w : windows) {
        const std::array<double, 2> scores = model.forward(w.values);
        const Label predicted = scores[1] > scores[0] ? Label::spike : Label::no_spike;
        report.confusion.count(w.label, predicted);
        spike_scores.push_back(scores[1]);
        labels.push_back(w.label);
    }
    const Metrics m = metrics_from_confusion(report.confusion);
    report.accuracy = m.accuracy;
    report.precision = m.precision;
    report.recall = m.recall;
    report.f1 = m.f1;
    report.roc = roc_curve(spike_scores, labels);
    report.auc = auc(report.roc);
    return report;
}

}  // namespace spikeforge
