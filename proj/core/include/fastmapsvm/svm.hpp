#ifndef FASTMAPSVM_SVM_HPP
#define FASTMAPSVM_SVM_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fastmapsvm {

enum class KernelKind { kLinear, kRbf };

struct KernelSpec {
    KernelKind kind = KernelKind::kRbf;
    double gamma = 1.0;  // rbf only, must be positive
};

struct SVMModel {
    std::vector<std::vector<double>> support_vectors;
    std::vector<double> dual_coefs;  // alpha_i * y_i, nonzero
    double bias = 0.0;
    KernelSpec kernel;
    double c = 1.0;
};

// linear -> <x, y>; rbf -> exp(-gamma * |x - y|^2). Dimensions must match.
double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> y);

// The "scale" gamma: 1 / (dim * pooled population variance of X entries);
// falls back to 1 when the variance vanishes.
double resolve_gamma_scale(const std::vector<std::vector<double>>& X);

// Soft-margin dual via sequential minimal optimization. Labels are -1/+1 and
// both classes must be present. The second working-set index is the non-bound
// point with the largest error gap, with seeded random scans (non-bound
// first, then all points) as fallback, and each violating point is worked
// until its violation clears before the sweep moves on. max_passes caps the
// number of outer sweeps; convergence (a full sweep with no updates and a
// threshold re-derived from the alphas agreeing with the running one)
// normally ends training much earlier. Vectors with alpha below 1e-8 are
// dropped from the model. The bias is the mean of y_i - raw_i over free
// support vectors (0 < alpha < C); without any, it is the midpoint of the
// interval the bound points leave open. If objective_trace is given, the
// dual objective is appended after every successful pair update.
SVMModel train_svm(const std::vector<std::vector<double>>& X, std::span<const int> y,
                   double C, KernelSpec kernel, double tol = 1e-3, int max_passes = 500,
                   std::uint64_t seed = 0, std::vector<double>* objective_trace = nullptr);

// sum_i dual_coefs[i] * kernel(sv_i, x) + bias
double decision_function(const SVMModel& model, std::span<const double> x);

// Gamma grid entry: either the data-driven "scale" value or a literal.
struct GammaChoice {
    bool scale = true;
    double value = 0.0;
};

struct GridSearchConfig {
    std::vector<double> c_grid{0.1, 1.0, 10.0, 100.0};
    std::vector<GammaChoice> gamma_grid{
        {true, 0.0}, {false, 0.01}, {false, 0.1}, {false, 1.0}};
    int folds = 5;
    std::uint64_t seed = 0;
    std::string scoring = "f1";  // "f1" or "accuracy", scored against label +1
};

struct GridCell {
    double c = 0.0;
    GammaChoice gamma;
    double resolved_gamma = 0.0;  // gamma on the full input, 0 for linear
    double mean_score = 0.0;
};

struct GridSearchResult {
    double best_c = 0.0;
    GammaChoice best_gamma;
    double best_resolved_gamma = 0.0;
    double best_score = 0.0;
    std::vector<GridCell> cells;
};

// Stratified k-fold cross validation over the (C, gamma) grid. Cells are
// visited in ascending (C, resolved gamma) order with strictly-better
// replacement, so score ties resolve to the smallest C and then the smallest
// gamma. For a linear kernel the gamma grid collapses to a single dummy
// entry. Requires every class to have at least `folds` members.
GridSearchResult grid_search(const std::vector<std::vector<double>>& X,
                             std::span<const int> y, const GridSearchConfig& config,
                             KernelKind kind, int jobs = 1);

}  // namespace fastmapsvm

#endif
