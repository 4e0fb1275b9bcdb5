#ifndef FASTMAPSVM_EVALUATION_HPP
#define FASTMAPSVM_EVALUATION_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fastmapsvm/pipeline.hpp"
#include "fastmapsvm/waveform.hpp"

namespace fastmapsvm {

// Class 1 counts as positive throughout.
struct ConfusionMatrix {
    long long tp = 0, fp = 0, tn = 0, fn = 0;
    long long total() const { return tp + fp + tn + fn; }
};

ConfusionMatrix confusion_matrix(std::span<const int> truth, std::span<const int> predicted);

// Ratios that come out 0/0 are reported as 0 with their defined flag cleared,
// so sweep tables stay total.
struct Metrics {
    double precision = 0.0, recall = 0.0, f1 = 0.0;
    double accuracy = 0.0, balanced_accuracy = 0.0;
    bool precision_defined = true, recall_defined = true, f1_defined = true;
    bool accuracy_defined = true, balanced_defined = true;
};

Metrics classification_metrics(const ConfusionMatrix& cm);

struct RocPoint {
    double fpr = 0.0, tpr = 0.0;
};

struct RocResult {
    std::vector<RocPoint> points;  // starts at (0,0), ends at (1,1)
    double auc = 0.0;
};

// Threshold sweep over descending unique scores with tied scores grouped.
// The trapezoid areas are accumulated in exact integer arithmetic and divided
// once, which makes the result identical to pair counting with ties at 1/2.
// Requires both classes present.
RocResult roc_auc(std::span<const double> scores, std::span<const int> labels);

struct MetricRow {
    double axis_value = 0.0;
    Metrics metrics;
    double auc = 0.0;
};

// CSV with header axis_value,precision,recall,f1,accuracy,balanced_accuracy,auc
std::string metrics_csv(std::span<const MetricRow> rows);

// Predict + confusion metrics + AUC against a labeled set.
MetricRow evaluate_model(const FastMapSVMModel& model, const LabeledWaveformSet& test,
                         double axis_value);

// The fixed perturbation the robustness harness applies before the sigma
// loop: each item circularly shifted by a uniform offset from
// [shift_min_s, shift_max_s] (drawn once per item, in item order) and then
// max-amplitude-normalized per channel. Exposed so callers can reproduce
// row 0 of the experiment independently.
LabeledWaveformSet shifted_normalized_set(const LabeledWaveformSet& test,
                                          double shift_min_s, double shift_max_s,
                                          std::uint64_t seed);

// One metric row per sigma in {0, step, 2*step, ..., <= sigma_max}: the
// shifted/normalized items are perturbed with seeded Gaussian noise of that
// sigma (in per-channel standard-deviation units) and scored by the model.
std::vector<MetricRow> noise_robustness_experiment(
    const FastMapSVMModel& model, const LabeledWaveformSet& test, double sigma_max,
    double sigma_step = 0.5, double shift_min_s = -2.0, double shift_max_s = 2.0,
    std::uint64_t seed = 0);

enum class SweepAxis { kTrainSize, kK };

// Deterministic partition used by sensitivity_sweep: a class-balanced
// held-out evaluation subset plus per-class training pools in shuffled order.
struct SweepSplit {
    std::vector<std::size_t> eval_idx;
    std::vector<std::size_t> pool_idx[2];  // per class, shuffled
};

SweepSplit sweep_split(const LabeledWaveformSet& dataset, std::uint64_t seed);

struct SweepResult {
    std::vector<MetricRow> rows;
    std::vector<std::string> eval_ids;                // identical across rows
    std::vector<std::vector<std::string>> train_ids;  // one list per row
};

// Trains one model per value, either on a class-balanced training subset of
// that total size (train_size axis, nested across rows) or on the full pool
// with K = value (K axis), and evaluates every model on the same held-out
// subset. Row r fits with seed mix_seed(seed, 100 + r).
SweepResult sensitivity_sweep(const LabeledWaveformSet& dataset, const PipelineConfig& base,
                              SweepAxis axis, std::span<const int> values,
                              std::uint64_t seed);

}  // namespace fastmapsvm

#endif
