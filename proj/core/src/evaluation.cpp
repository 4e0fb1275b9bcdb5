#include "fastmapsvm/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "fastmapsvm/detail/format.hpp"
#include "fastmapsvm/detail/seed.hpp"

namespace fastmapsvm {

namespace {

// Salts for the harness sub-streams.
enum : std::uint64_t { kSaltShift = 7001, kSaltNoiseBase = 7100, kSaltSweepSplit = 7500 };

struct Ratio {
    double value = 0.0;
    bool defined = true;
};

Ratio ratio(long long num, long long den) {
    if (den == 0) return {0.0, false};
    return {static_cast<double>(num) / static_cast<double>(den), true};
}

std::vector<int> truth_labels(const LabeledWaveformSet& set) {
    std::vector<int> t(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) t[i] = set[i].label;
    return t;
}

}  // namespace

ConfusionMatrix confusion_matrix(std::span<const int> truth, std::span<const int> predicted) {
    if (truth.size() != predicted.size())
        throw std::invalid_argument("confusion matrix: size mismatch");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] != 0 && truth[i] != 1)
            throw std::invalid_argument("confusion matrix: binary labels required");
        if (predicted[i] != 0 && predicted[i] != 1)
            throw std::invalid_argument("confusion matrix: binary labels required");
        if (truth[i] == 1)
            predicted[i] == 1 ? ++cm.tp : ++cm.fn;
        else
            predicted[i] == 1 ? ++cm.fp : ++cm.tn;
    }
    return cm;
}

Metrics classification_metrics(const ConfusionMatrix& cm) {
    Metrics m;
    const auto precision = ratio(cm.tp, cm.tp + cm.fp);
    const auto recall = ratio(cm.tp, cm.tp + cm.fn);
    const auto specificity = ratio(cm.tn, cm.tn + cm.fp);
    m.precision = precision.value;
    m.precision_defined = precision.defined;
    m.recall = recall.value;
    m.recall_defined = recall.defined;

    const double pr_sum = m.precision + m.recall;
    if (precision.defined && recall.defined && pr_sum > 0.0) {
        m.f1 = 2.0 * m.precision * m.recall / pr_sum;
    } else {
        m.f1 = 0.0;
        m.f1_defined = false;
    }

    const auto accuracy = ratio(cm.tp + cm.tn, cm.total());
    m.accuracy = accuracy.value;
    m.accuracy_defined = accuracy.defined;

    m.balanced_accuracy = (recall.value + specificity.value) / 2.0;
    m.balanced_defined = recall.defined && specificity.defined;
    return m;
}

RocResult roc_auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("roc: size mismatch");
    long long pos = 0, neg = 0;
    for (int lb : labels) {
        if (lb == 1)
            ++pos;
        else if (lb == 0)
            ++neg;
        else
            throw std::invalid_argument("roc: binary labels required");
    }
    if (pos == 0 || neg == 0)
        throw std::invalid_argument("roc: both classes required");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocResult out;
    out.points.push_back({0.0, 0.0});
    long long tp = 0, fp = 0;
    // Twice the raw trapezoid area, accumulated exactly in integers:
    // sum over tied-score groups of dFP * (TP_before + TP_after).
    long long acc2 = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        long long gp = 0, gn = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            labels[order[j]] == 1 ? ++gp : ++gn;
            ++j;
        }
        acc2 += gn * (2 * tp + gp);
        tp += gp;
        fp += gn;
        out.points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                              static_cast<double>(tp) / static_cast<double>(pos)});
        i = j;
    }
    out.auc = static_cast<double>(acc2) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
    return out;
}

std::string metrics_csv(std::span<const MetricRow> rows) {
    std::string csv = "axis_value,precision,recall,f1,accuracy,balanced_accuracy,auc\n";
    for (const auto& r : rows) {
        csv += detail::format_double(r.axis_value);
        csv += ',';
        csv += detail::format_double(r.metrics.precision);
        csv += ',';
        csv += detail::format_double(r.metrics.recall);
        csv += ',';
        csv += detail::format_double(r.metrics.f1);
        csv += ',';
        csv += detail::format_double(r.metrics.accuracy);
        csv += ',';
        csv += detail::format_double(r.metrics.balanced_accuracy);
        csv += ',';
        csv += detail::format_double(r.auc);
        csv += '\n';
    }
    return csv;
}

MetricRow evaluate_model(const FastMapSVMModel& model, const LabeledWaveformSet& test,
                         double axis_value) {
    std::vector<Waveform> objects;
    objects.reserve(test.size());
    for (const auto& item : test.items()) objects.push_back(item.waveform);
    const auto preds = predict(model, objects);

    std::vector<int> predicted(preds.size());
    std::vector<double> scores(preds.size());
    for (std::size_t i = 0; i < preds.size(); ++i) {
        predicted[i] = preds[i].label;
        scores[i] = preds[i].score;
    }
    const auto truth = truth_labels(test);
    MetricRow row;
    row.axis_value = axis_value;
    row.metrics = classification_metrics(confusion_matrix(truth, predicted));
    row.auc = roc_auc(scores, truth).auc;
    return row;
}

LabeledWaveformSet shifted_normalized_set(const LabeledWaveformSet& test,
                                          double shift_min_s, double shift_max_s,
                                          std::uint64_t seed) {
    if (!(shift_max_s >= shift_min_s))
        throw std::invalid_argument("robustness: empty shift range");
    LabeledWaveformSet out(test.class_names(), test.sample_rate_hz(), test.n_channels());
    std::mt19937_64 rng(detail::mix_seed(seed, kSaltShift));
    std::uniform_real_distribution<double> offset(shift_min_s, shift_max_s);
    for (const auto& item : test.items()) {
        const Waveform shifted = circular_shift(item.waveform, offset(rng));
        out.add(normalize_max_amplitude(shifted), item.label);
    }
    return out;
}

std::vector<MetricRow> noise_robustness_experiment(const FastMapSVMModel& model,
                                                   const LabeledWaveformSet& test,
                                                   double sigma_max, double sigma_step,
                                                   double shift_min_s, double shift_max_s,
                                                   std::uint64_t seed) {
    if (!(sigma_step > 0.0))
        throw std::invalid_argument("robustness: sigma_step must be positive");
    if (!(sigma_max >= 0.0))
        throw std::invalid_argument("robustness: sigma_max must be non-negative");

    const auto base = shifted_normalized_set(test, shift_min_s, shift_max_s, seed);
    const int rows = static_cast<int>(std::floor(sigma_max / sigma_step + 1e-9)) + 1;

    std::vector<MetricRow> table;
    for (int r = 0; r < rows; ++r) {
        const double sigma = static_cast<double>(r) * sigma_step;
        LabeledWaveformSet noisy(base.class_names(), base.sample_rate_hz(), base.n_channels());
        const std::uint64_t row_seed = detail::mix_seed(seed, kSaltNoiseBase + static_cast<std::uint64_t>(r));
        for (std::size_t i = 0; i < base.size(); ++i) {
            noisy.add(add_gaussian_noise(base[i].waveform, sigma,
                                         detail::mix_seed(row_seed, i)),
                      base[i].label);
        }
        table.push_back(evaluate_model(model, noisy, sigma));
    }
    return table;
}

SweepSplit sweep_split(const LabeledWaveformSet& dataset, std::uint64_t seed) {
    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < dataset.size(); ++i)
        by_class[dataset[i].label].push_back(i);
    const std::size_t min_class = std::min(by_class[0].size(), by_class[1].size());
    if (min_class < 2)
        throw std::invalid_argument("sweep: need at least two objects per class");

    // A quarter of the smaller class (at least one) is held out per class;
    // the remainder, shuffled, is the training pool.
    const std::size_t eval_per_class = std::max<std::size_t>(1, min_class / 4);
    SweepSplit split;
    for (int cls = 0; cls < 2; ++cls) {
        auto idx = by_class[cls];
        std::mt19937_64 rng(detail::mix_seed(seed, kSaltSweepSplit + static_cast<std::uint64_t>(cls)));
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (i < eval_per_class)
                split.eval_idx.push_back(idx[i]);
            else
                split.pool_idx[cls].push_back(idx[i]);
        }
    }
    std::sort(split.eval_idx.begin(), split.eval_idx.end());
    return split;
}

SweepResult sensitivity_sweep(const LabeledWaveformSet& dataset, const PipelineConfig& base,
                              SweepAxis axis, std::span<const int> values,
                              std::uint64_t seed) {
    if (values.empty()) throw std::invalid_argument("sweep: empty value list");
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] < values[i - 1])
            throw std::invalid_argument("sweep: values must be sorted ascending");
    if (values.front() < 1) throw std::invalid_argument("sweep: values must be positive");

    const auto split = sweep_split(dataset, seed);
    const std::size_t pool_min = std::min(split.pool_idx[0].size(), split.pool_idx[1].size());

    LabeledWaveformSet eval_set(dataset.class_names(), dataset.sample_rate_hz(),
                                dataset.n_channels());
    SweepResult result;
    for (std::size_t i : split.eval_idx) {
        eval_set.add(dataset[i].waveform, dataset[i].label);
        result.eval_ids.push_back(dataset[i].waveform.id());
    }

    for (std::size_t r = 0; r < values.size(); ++r) {
        const int value = values[r];
        std::size_t take_per_class;
        PipelineConfig config = base;
        config.seed = detail::mix_seed(seed, 100 + static_cast<std::uint64_t>(r));
        if (axis == SweepAxis::kTrainSize) {
            if (value % 2 != 0)
                throw std::invalid_argument("sweep: train_size values must be even (balanced)");
            take_per_class = static_cast<std::size_t>(value) / 2;
            if (take_per_class > pool_min)
                throw std::invalid_argument("sweep: requested size exceeds data");
        } else {
            config.dim = value;
            take_per_class = pool_min;
            if (static_cast<std::size_t>(value) > pool_min)
                throw std::invalid_argument("sweep: requested size exceeds data");
        }

        LabeledWaveformSet train_set(dataset.class_names(), dataset.sample_rate_hz(),
                                     dataset.n_channels());
        std::vector<std::string> ids;
        for (int cls = 0; cls < 2; ++cls) {
            for (std::size_t i = 0; i < take_per_class; ++i) {
                const std::size_t idx = split.pool_idx[cls][i];
                train_set.add(dataset[idx].waveform, dataset[idx].label);
                ids.push_back(dataset[idx].waveform.id());
            }
        }
        const auto model = fit(train_set, config);
        result.rows.push_back(evaluate_model(model, eval_set, static_cast<double>(value)));
        result.train_ids.push_back(std::move(ids));
    }
    return result;
}

}  // namespace fastmapsvm
