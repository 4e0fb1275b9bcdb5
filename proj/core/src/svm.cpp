#include "fastmapsvm/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "fastmapsvm/detail/seed.hpp"
#include "fastmapsvm/parallel.hpp"

namespace fastmapsvm {

namespace {

constexpr double kAlphaFloor = 1e-8;  // below this an alpha counts as zero
constexpr double kStepEps = 1e-12;    // minimum meaningful alpha movement
constexpr int kDrainLimit = 256;      // inner steps allowed per point per sweep

void check_matrix(const std::vector<std::vector<double>>& X) {
    if (X.empty()) throw std::invalid_argument("svm: empty input");
    const std::size_t dim = X.front().size();
    if (dim == 0) throw std::invalid_argument("svm: zero-dimensional points");
    for (const auto& row : X) {
        if (row.size() != dim)
            throw std::invalid_argument("svm: inconsistent point dimensions");
        for (double v : row)
            if (!std::isfinite(v))
                throw std::invalid_argument("svm: non-finite features");
    }
}

// SMO working state. The Gram matrix is precomputed; the embedding stage
// upstream keeps n at desk scale.
struct Smo {
    const std::vector<std::vector<double>>& x;
    std::span<const int> y;
    double c;
    double tol;
    std::vector<double> alpha;
    double b = 0.0;
    std::vector<std::vector<double>> gram;
    std::mt19937_64 rng;
    std::vector<double>* trace = nullptr;

    Smo(const std::vector<std::vector<double>>& x_, std::span<const int> y_, double c_,
        double tol_, const KernelSpec& kernel, std::uint64_t seed)
        : x(x_), y(y_), c(c_), tol(tol_), alpha(x_.size(), 0.0), rng(seed) {
        const std::size_t n = x.size();
        gram.assign(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j <= i; ++j)
                gram[i][j] = gram[j][i] = kernel_eval(kernel, x[i], x[j]);
    }

    double raw(std::size_t i) const {
        double s = 0.0;
        for (std::size_t j = 0; j < alpha.size(); ++j)
            if (alpha[j] > 0.0) s += alpha[j] * y[j] * gram[i][j];
        return s;
    }

    double error(std::size_t i) const { return raw(i) + b - y[i]; }

    bool non_bound(std::size_t i) const {
        return alpha[i] > kAlphaFloor && alpha[i] < c - kAlphaFloor;
    }

    // Threshold consistent with the current alphas: the mean margin offset of
    // the free support vectors when any exist, otherwise the midpoint of the
    // interval the bound points leave open.
    double threshold_estimate() const {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            if (non_bound(i)) {
                sum += y[i] - raw(i);
                ++count;
            }
        }
        if (count > 0) return sum / static_cast<double>(count);
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            const double edge = y[i] - raw(i);
            const bool at_zero = alpha[i] <= kAlphaFloor;
            if ((at_zero && y[i] > 0) || (!at_zero && y[i] < 0))
                lo = std::max(lo, edge);
            else
                hi = std::min(hi, edge);
        }
        if (!std::isfinite(hi)) return lo;
        if (!std::isfinite(lo)) return hi;
        return 0.5 * (lo + hi);
    }

    double objective() const {
        double s = 0.0, q = 0.0;
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            if (alpha[i] == 0.0) continue;
            s += alpha[i];
            for (std::size_t j = 0; j < alpha.size(); ++j)
                q += alpha[i] * alpha[j] * y[i] * y[j] * gram[i][j];
        }
        return s - 0.5 * q;
    }

    bool take_step(std::size_t i1, std::size_t i2) {
        if (i1 == i2) return false;
        const double a1o = alpha[i1], a2o = alpha[i2];
        const int y1 = y[i1], y2 = y[i2];
        const double e1 = error(i1), e2 = error(i2);
        const double s = y1 * y2;
        double lo, hi;
        if (y1 != y2) {
            lo = std::max(0.0, a2o - a1o);
            hi = std::min(c, c + a2o - a1o);
        } else {
            lo = std::max(0.0, a1o + a2o - c);
            hi = std::min(c, a1o + a2o);
        }
        if (lo >= hi) return false;
        const double k11 = gram[i1][i1], k12 = gram[i1][i2], k22 = gram[i2][i2];
        const double eta = k11 + k22 - 2.0 * k12;
        double a2;
        if (eta > 0.0) {
            a2 = a2o + y2 * (e1 - e2) / eta;
            a2 = std::clamp(a2, lo, hi);
        } else {
            // Flat or concave direction: minimize the objective at an endpoint.
            const double f1 = y1 * (e1 + b) - a1o * k11 - s * a2o * k12;
            const double f2 = y2 * (e2 + b) - s * a1o * k12 - a2o * k22;
            const double l1 = a1o + s * (a2o - lo);
            const double h1 = a1o + s * (a2o - hi);
            const double lo_obj = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 +
                                  0.5 * lo * lo * k22 + s * lo * l1 * k12;
            const double hi_obj = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 +
                                  0.5 * hi * hi * k22 + s * hi * h1 * k12;
            if (lo_obj < hi_obj - kStepEps)
                a2 = lo;
            else if (lo_obj > hi_obj + kStepEps)
                a2 = hi;
            else
                return false;
        }
        if (std::abs(a2 - a2o) < kStepEps * (a2 + a2o + kStepEps)) return false;
        double a1 = a1o + s * (a2o - a2);
        if (a1 < 0.0) {
            a2 += s * a1;
            a1 = 0.0;
        } else if (a1 > c) {
            a2 += s * (a1 - c);
            a1 = c;
        }
        const double b1 = b - e1 - y1 * (a1 - a1o) * k11 - y2 * (a2 - a2o) * k12;
        const double b2 = b - e2 - y1 * (a1 - a1o) * k12 - y2 * (a2 - a2o) * k22;
        if (a1 > kAlphaFloor && a1 < c - kAlphaFloor)
            b = b1;
        else if (a2 > kAlphaFloor && a2 < c - kAlphaFloor)
            b = b2;
        else
            b = (b1 + b2) / 2.0;  // midpoint rule
        alpha[i1] = a1;
        alpha[i2] = a2;
        if (trace) trace->push_back(objective());
        return true;
    }

    bool examine(std::size_t i1) {
        const double r1 = error(i1) * y[i1];
        const bool violated = (r1 < -tol && alpha[i1] < c - kAlphaFloor) ||
                              (r1 > tol && alpha[i1] > kAlphaFloor);
        if (!violated) return false;
        const std::size_t n = alpha.size();
        // Best partner first: the largest error gap gives the largest step.
        // Falling back to random-start scans keeps progress possible when
        // that partner's step is blocked by the box.
        const double e1 = error(i1);
        std::size_t best = n;
        double best_gap = -1.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i1 || !non_bound(j)) continue;
            const double gap = std::abs(e1 - error(j));
            if (gap > best_gap) {
                best_gap = gap;
                best = j;
            }
        }
        if (best < n && take_step(i1, best)) return true;
        std::size_t start = rng() % n;
        for (std::size_t t = 0; t < n; ++t) {
            const std::size_t j = (start + t) % n;
            if (non_bound(j) && take_step(i1, j)) return true;
        }
        start = rng() % n;
        for (std::size_t t = 0; t < n; ++t) {
            const std::size_t j = (start + t) % n;
            if (take_step(i1, j)) return true;
        }
        return false;
    }

    void run(int max_passes) {
        bool examine_all = true;
        int passes = 0;
        while (passes < max_passes) {
            int changed = 0;
            for (std::size_t i = 0; i < alpha.size(); ++i) {
                if (!examine_all && !non_bound(i)) continue;
                if (!examine(i)) continue;
                ++changed;
                // Keep working the same point until its violation clears or
                // no partner accepts a step; one step per sweep starves big
                // violators when the pass budget is finite.
                for (int inner = 1; inner < kDrainLimit && examine(i); ++inner) {
                }
            }
            ++passes;
            if (!examine_all) {
                if (changed == 0) examine_all = true;
                continue;
            }
            if (changed > 0) {
                examine_all = false;
                continue;
            }
            // A full pass accepted no step, but that alone does not prove
            // convergence: the running threshold drifts whenever a step ends
            // with both alphas on the box boundary, and examine() measures
            // violations against it, so a drifted threshold hides genuine
            // violators while pair steps (which cancel any threshold offset)
            // find nothing to do. Stop only once a threshold re-derived from
            // the alphas agrees with the running one.
            const double fresh = threshold_estimate();
            if (std::abs(fresh - b) <= tol) break;
            b = fresh;
        }
    }
};

double f1_of_confusion(long long tp, long long fp, long long fn) {
    const double denom = static_cast<double>(2 * tp + fp + fn);
    return denom > 0.0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
}

}  // namespace

double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> y) {
    if (x.size() != y.size())
        throw std::invalid_argument("kernel: dimension mismatch");
    if (spec.kind == KernelKind::kLinear) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
        return s;
    }
    if (!(spec.gamma > 0.0))
        throw std::invalid_argument("kernel: rbf gamma must be positive");
    double q = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        q += d * d;
    }
    return std::exp(-spec.gamma * q);
}

double resolve_gamma_scale(const std::vector<std::vector<double>>& X) {
    check_matrix(X);
    const std::size_t dim = X.front().size();
    double sum = 0.0, count = 0.0;
    for (const auto& row : X)
        for (double v : row) {
            sum += v;
            count += 1.0;
        }
    const double mean = sum / count;
    double var = 0.0;
    for (const auto& row : X)
        for (double v : row) var += (v - mean) * (v - mean);
    var /= count;
    if (!(var > 0.0)) return 1.0;
    return 1.0 / (static_cast<double>(dim) * var);
}

SVMModel train_svm(const std::vector<std::vector<double>>& X, std::span<const int> y,
                   double C, KernelSpec kernel, double tol, int max_passes,
                   std::uint64_t seed, std::vector<double>* objective_trace) {
    check_matrix(X);
    if (y.size() != X.size())
        throw std::invalid_argument("svm: labels/points size mismatch");
    bool has_pos = false, has_neg = false;
    for (int lb : y) {
        if (lb == 1)
            has_pos = true;
        else if (lb == -1)
            has_neg = true;
        else
            throw std::invalid_argument("svm: labels must be -1 or +1");
    }
    if (!has_pos || !has_neg)
        throw std::invalid_argument("svm: both classes required");
    if (!(C > 0.0)) throw std::invalid_argument("svm: C must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("svm: tol must be positive");
    if (max_passes < 1) throw std::invalid_argument("svm: max_passes must be >= 1");
    if (kernel.kind == KernelKind::kRbf && !(kernel.gamma > 0.0))
        throw std::invalid_argument("svm: rbf gamma must be positive");

    Smo smo(X, y, C, tol, kernel, seed);
    smo.trace = objective_trace;
    smo.run(max_passes);

    SVMModel model;
    model.kernel = kernel;
    model.c = C;

    // Bias re-derived from the final alphas; free support vectors pin it
    // exactly, and when every support vector sits on the box boundary the
    // bound points still leave a valid interval.
    model.bias = smo.threshold_estimate();

    for (std::size_t i = 0; i < X.size(); ++i) {
        if (smo.alpha[i] > kAlphaFloor) {
            model.support_vectors.push_back(X[i]);
            model.dual_coefs.push_back(smo.alpha[i] * y[i]);
        }
    }
    return model;
}

double decision_function(const SVMModel& model, std::span<const double> x) {
    double s = model.bias;
    for (std::size_t i = 0; i < model.support_vectors.size(); ++i)
        s += model.dual_coefs[i] * kernel_eval(model.kernel, model.support_vectors[i], x);
    return s;
}

GridSearchResult grid_search(const std::vector<std::vector<double>>& X,
                             std::span<const int> y, const GridSearchConfig& config,
                             KernelKind kind, int jobs) {
    check_matrix(X);
    if (y.size() != X.size())
        throw std::invalid_argument("grid search: labels/points size mismatch");
    if (config.folds < 2)
        throw std::invalid_argument("grid search: folds must be >= 2");
    if (config.c_grid.empty())
        throw std::invalid_argument("grid search: empty C grid");
    if (kind == KernelKind::kRbf && config.gamma_grid.empty())
        throw std::invalid_argument("grid search: empty gamma grid");
    if (config.scoring != "f1" && config.scoring != "accuracy")
        throw std::invalid_argument("grid search: unknown scoring metric " + config.scoring);
    for (double c : config.c_grid)
        if (!(c > 0.0)) throw std::invalid_argument("grid search: C values must be positive");
    for (const auto& g : config.gamma_grid)
        if (!g.scale && !(g.value > 0.0))
            throw std::invalid_argument("grid search: gamma values must be positive");

    const std::size_t n = X.size();
    std::size_t class_count[2] = {0, 0};
    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < n; ++i) {
        const int cls = y[i] == 1 ? 1 : 0;
        ++class_count[cls];
        by_class[cls].push_back(i);
    }
    if (class_count[0] < static_cast<std::size_t>(config.folds) ||
        class_count[1] < static_cast<std::size_t>(config.folds))
        throw std::invalid_argument(
            "grid search: fold construction impossible (a class has fewer members than folds)");

    // Stratified assignment: shuffle within each class, deal round-robin.
    std::vector<int> fold_of(n, 0);
    for (int cls = 0; cls < 2; ++cls) {
        auto idx = by_class[cls];
        std::mt19937_64 rng(detail::mix_seed(config.seed, static_cast<std::uint64_t>(cls)));
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t i = 0; i < idx.size(); ++i)
            fold_of[idx[i]] = static_cast<int>(i % static_cast<std::size_t>(config.folds));
    }

    const double full_scale = kind == KernelKind::kRbf ? resolve_gamma_scale(X) : 0.0;

    struct Cell {
        double c;
        GammaChoice gamma;
        double order_gamma;  // resolved on the full input, for ordering only
    };
    std::vector<Cell> cells;
    {
        auto c_sorted = config.c_grid;
        std::sort(c_sorted.begin(), c_sorted.end());
        std::vector<std::pair<double, GammaChoice>> g_sorted;
        if (kind == KernelKind::kRbf) {
            for (const auto& g : config.gamma_grid)
                g_sorted.emplace_back(g.scale ? full_scale : g.value, g);
            std::stable_sort(g_sorted.begin(), g_sorted.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
        } else {
            g_sorted.emplace_back(0.0, GammaChoice{false, 0.0});
        }
        for (double c : c_sorted)
            for (const auto& [og, g] : g_sorted)
                cells.push_back({c, g, og});
    }

    const int folds = config.folds;
    std::vector<double> fold_scores(cells.size() * static_cast<std::size_t>(folds), 0.0);
    parallel_for(fold_scores.size(), jobs, [&](std::size_t task) {
        const std::size_t cell_idx = task / static_cast<std::size_t>(folds);
        const int fold = static_cast<int>(task % static_cast<std::size_t>(folds));
        const auto& cell = cells[cell_idx];

        std::vector<std::vector<double>> x_train;
        std::vector<int> y_train;
        std::vector<std::size_t> val_idx;
        for (std::size_t i = 0; i < n; ++i) {
            if (fold_of[i] == fold) {
                val_idx.push_back(i);
            } else {
                x_train.push_back(X[i]);
                y_train.push_back(y[i]);
            }
        }

        KernelSpec spec;
        spec.kind = kind;
        if (kind == KernelKind::kRbf)
            spec.gamma = cell.gamma.scale ? resolve_gamma_scale(x_train) : cell.gamma.value;
        const auto model = train_svm(x_train, y_train, cell.c, spec, 1e-3, 500,
                                     detail::mix_seed(config.seed, 1000 + task));

        long long tp = 0, fp = 0, fn = 0, correct = 0;
        for (std::size_t i : val_idx) {
            const bool pred_pos = decision_function(model, X[i]) > 0.0;
            const bool is_pos = y[i] == 1;
            if (pred_pos && is_pos) ++tp;
            if (pred_pos && !is_pos) ++fp;
            if (!pred_pos && is_pos) ++fn;
            if (pred_pos == is_pos) ++correct;
        }
        fold_scores[task] = config.scoring == "f1"
                                ? f1_of_confusion(tp, fp, fn)
                                : static_cast<double>(correct) /
                                      static_cast<double>(val_idx.size());
    });

    GridSearchResult result;
    result.best_score = -1.0;
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        double mean = 0.0;
        for (int f = 0; f < folds; ++f)
            mean += fold_scores[ci * static_cast<std::size_t>(folds) + static_cast<std::size_t>(f)];
        mean /= static_cast<double>(folds);
        GridCell out_cell;
        out_cell.c = cells[ci].c;
        out_cell.gamma = cells[ci].gamma;
        out_cell.resolved_gamma = cells[ci].order_gamma;
        out_cell.mean_score = mean;
        result.cells.push_back(out_cell);
        if (mean > result.best_score) {
            result.best_score = mean;
            result.best_c = cells[ci].c;
            result.best_gamma = cells[ci].gamma;
            result.best_resolved_gamma = cells[ci].order_gamma;
        }
    }
    return result;
}

}  // namespace fastmapsvm
