#include <cmath>
#include <cstdlib>
#include <random>
#include <vector>

#include "doctest.h"
#include "fastmapsvm/svm.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using fastmapsvm::decision_function;
using fastmapsvm::GammaChoice;
using fastmapsvm::grid_search;
using fastmapsvm::GridSearchConfig;
using fastmapsvm::kernel_eval;
using fastmapsvm::KernelKind;
using fastmapsvm::KernelSpec;
using fastmapsvm::resolve_gamma_scale;
using fastmapsvm::SVMModel;
using fastmapsvm::train_svm;

namespace {

int sign_of(double v) { return v >= 0.0 ? 1 : -1; }

std::size_t train_errors(const SVMModel& m, const std::vector<std::vector<double>>& X,
                         const std::vector<int>& y) {
    std::size_t errs = 0;
    for (std::size_t i = 0; i < X.size(); ++i)
        if (sign_of(decision_function(m, X[i])) != y[i]) ++errs;
    return errs;
}

}  // namespace

TEST_CASE("kernel evaluation matches hand values") {
    const std::vector<double> a{1.0, 2.0}, b{3.0, 4.0};
    KernelSpec lin{KernelKind::kLinear, 1.0};
    CHECK(kernel_eval(lin, a, b) == doctest::Approx(11.0).epsilon(1e-12));
    CHECK(kernel_eval(lin, a, a) == doctest::Approx(5.0).epsilon(1e-12));

    const std::vector<double> c{1.0, 2.0}, d{1.0, 4.0};  // squared distance 4
    KernelSpec rbf{KernelKind::kRbf, 0.5};
    CHECK(kernel_eval(rbf, c, d) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
    CHECK(kernel_eval(rbf, c, c) == doctest::Approx(1.0).epsilon(1e-15));

    const std::vector<double> short_vec{1.0};
    CHECK_THROWS_AS(kernel_eval(lin, a, short_vec), std::invalid_argument);
    CHECK_THROWS_AS(kernel_eval(KernelSpec{KernelKind::kRbf, 0.0}, a, b), std::invalid_argument);
}

TEST_CASE("the two-point problem has a closed-form solution") {
    // x = -1, +1 with labels -1, +1 and C = 1: alpha = 0.5 each, bias 0
    const std::vector<std::vector<double>> X{{-1.0}, {1.0}};
    const std::vector<int> y{-1, 1};
    const auto m = train_svm(X, y, 1.0, KernelSpec{KernelKind::kLinear, 1.0}, 1e-6);
    REQUIRE(m.support_vectors.size() == 2);
    for (std::size_t i = 0; i < 2; ++i)
        CHECK(std::abs(m.dual_coefs[i]) == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(m.bias == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(decision_function(m, std::vector<double>{0.0}) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(decision_function(m, std::vector<double>{2.0}) == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(decision_function(m, std::vector<double>{-1.0}) ==
          doctest::Approx(-1.0).epsilon(1e-3));
}

TEST_CASE("the rbf kernel separates data no hyperplane can") {
    const std::vector<std::vector<double>> X{{0.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}, {1.0, 0.0}};
    const std::vector<int> y{-1, -1, 1, 1};
    const auto m = train_svm(X, y, 10.0, KernelSpec{KernelKind::kRbf, 1.0});
    CHECK(train_errors(m, X, y) == 0);
}

TEST_CASE("training validates its inputs") {
    const std::vector<std::vector<double>> X{{0.0}, {1.0}};
    CHECK_THROWS_WITH_AS(
        train_svm(X, std::vector<int>{1, 1}, 1.0, KernelSpec{KernelKind::kLinear, 1.0}),
        doctest::Contains("both classes"), std::invalid_argument);
    CHECK_THROWS_AS(
        train_svm(X, std::vector<int>{1, 2}, 1.0, KernelSpec{KernelKind::kLinear, 1.0}),
        std::invalid_argument);
    CHECK_THROWS_AS(
        train_svm(X, std::vector<int>{-1, 1}, 0.0, KernelSpec{KernelKind::kLinear, 1.0}),
        std::invalid_argument);
    const std::vector<std::vector<double>> bad{{0.0}, {std::nan("")}};
    CHECK_THROWS_AS(
        train_svm(bad, std::vector<int>{-1, 1}, 1.0, KernelSpec{KernelKind::kLinear, 1.0}),
        std::invalid_argument);
    const std::vector<std::vector<double>> ragged{{0.0, 1.0}, {1.0}};
    CHECK_THROWS_AS(
        train_svm(ragged, std::vector<int>{-1, 1}, 1.0, KernelSpec{KernelKind::kLinear, 1.0}),
        std::invalid_argument);
}

TEST_CASE("trained duals satisfy the box and equality constraints") {
    std::mt19937_64 rng(7);
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    testsupport::make_blobs(rng, 40, 3, 2.0, X, y);
    const double C = 5.0;
    const auto m = train_svm(X, y, C, KernelSpec{KernelKind::kRbf, 0.5});
    REQUIRE(!m.support_vectors.empty());

    double sum = 0.0;
    for (double dc : m.dual_coefs) {
        sum += dc;
        CHECK(std::abs(dc) > 0.0);
        CHECK(std::abs(dc) <= C + 1e-12);
    }
    CHECK(std::abs(sum) <= 1e-6);

    // free support vectors sit on the margin
    for (std::size_t i = 0; i < m.support_vectors.size(); ++i) {
        const double a = std::abs(m.dual_coefs[i]);
        if (a > 1e-6 && a < C - 1e-6) {
            const double f = decision_function(m, m.support_vectors[i]);
            CHECK(std::abs(f) == doctest::Approx(1.0).epsilon(1e-2));
        }
    }
}

TEST_CASE("optimality conditions hold within the stopping tolerance") {
    std::mt19937_64 rng(11);
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    testsupport::make_blobs(rng, 30, 2, 1.5, X, y);
    const double C = 2.0;
    const double tol = 5e-4;
    const auto m = train_svm(X, y, C, KernelSpec{KernelKind::kRbf, 1.0}, tol);
    // the post-hoc bias recentering can move raw values by at most tol
    CHECK(testsupport::kkt_max_residual(m, X, y) <= 2.0 * tol + 1e-9);
}

TEST_CASE("linearly separable data is classified perfectly at large C") {
    std::mt19937_64 rng(13);
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    testsupport::make_blobs(rng, 50, 4, 6.0, X, y);
    const auto m = train_svm(X, y, 1000.0, KernelSpec{KernelKind::kLinear, 1.0});
    CHECK(train_errors(m, X, y) == 0);
}

TEST_CASE("the dual objective never decreases across updates") {
    std::mt19937_64 rng(17);
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    testsupport::make_blobs(rng, 25, 2, 1.0, X, y);
    std::vector<double> trace;
    (void)train_svm(X, y, 1.0, KernelSpec{KernelKind::kRbf, 0.7}, 1e-3, 500, 0, &trace);
    REQUIRE(trace.size() > 1);
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] >= trace[i - 1] - 1e-9);
}

TEST_CASE("training is deterministic for a fixed seed") {
    std::mt19937_64 rng(19);
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    testsupport::make_blobs(rng, 30, 3, 1.2, X, y);
    const auto a = train_svm(X, y, 3.0, KernelSpec{KernelKind::kRbf, 0.4}, 1e-3, 500, 42);
    const auto b = train_svm(X, y, 3.0, KernelSpec{KernelKind::kRbf, 0.4}, 1e-3, 500, 42);
    REQUIRE(a.support_vectors.size() == b.support_vectors.size());
    CHECK(a.bias == b.bias);
    for (std::size_t i = 0; i < a.dual_coefs.size(); ++i)
        CHECK(a.dual_coefs[i] == b.dual_coefs[i]);
}

TEST_CASE("the scale gamma is one over dim times pooled variance") {
    // entries {0, 2}: mean 1, population variance 1, dim 2 -> gamma 0.5
    const std::vector<std::vector<double>> X{{0.0, 2.0}, {2.0, 0.0}};
    CHECK(resolve_gamma_scale(X) == doctest::Approx(0.5).epsilon(1e-12));
    // constant features fall back to 1
    const std::vector<std::vector<double>> flat{{3.0, 3.0}, {3.0, 3.0}};
    CHECK(resolve_gamma_scale(flat) == doctest::Approx(1.0));
}

TEST_CASE("grid search scores cells and breaks ties toward small parameters") {
    std::mt19937_64 rng(23);
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    testsupport::make_blobs(rng, 30, 2, 8.0, X, y);

    SUBCASE("a single cell is always the winner") {
        GridSearchConfig cfg;
        cfg.c_grid = {2.0};
        cfg.gamma_grid = {{false, 0.3}};
        cfg.folds = 3;
        const auto r = grid_search(X, y, cfg, KernelKind::kRbf);
        REQUIRE(r.cells.size() == 1);
        CHECK(r.best_c == 2.0);
        CHECK(r.best_resolved_gamma == doctest::Approx(0.3));
        CHECK(r.best_score == doctest::Approx(r.cells[0].mean_score));
    }
    SUBCASE("well-separated blobs tie every cell, so the smallest C wins") {
        GridSearchConfig cfg;
        cfg.c_grid = {0.1, 1.0, 10.0};
        cfg.gamma_grid = {{false, 0.01}, {false, 0.1}};
        cfg.folds = 3;
        const auto r = grid_search(X, y, cfg, KernelKind::kRbf);
        CHECK(r.cells.size() == 6);
        CHECK(r.best_score == doctest::Approx(1.0));
        CHECK(r.best_c == 0.1);
        CHECK(r.best_resolved_gamma == doctest::Approx(0.01));
    }
    SUBCASE("the scale entry resolves against the full input") {
        GridSearchConfig cfg;
        cfg.c_grid = {1.0};
        cfg.gamma_grid = {{true, 0.0}};
        cfg.folds = 3;
        const auto r = grid_search(X, y, cfg, KernelKind::kRbf);
        REQUIRE(r.cells.size() == 1);
        CHECK(r.cells[0].resolved_gamma == doctest::Approx(resolve_gamma_scale(X)));
        CHECK(r.best_gamma.scale);
    }
    SUBCASE("a linear kernel ignores the gamma grid") {
        GridSearchConfig cfg;
        cfg.c_grid = {0.1, 1.0};
        cfg.folds = 3;
        const auto r = grid_search(X, y, cfg, KernelKind::kLinear);
        CHECK(r.cells.size() == 2);
        for (const auto& cell : r.cells) CHECK(cell.resolved_gamma == 0.0);
    }
    SUBCASE("every class needs at least one member per fold") {
        std::vector<std::vector<double>> tiny{{0.0}, {1.0}, {2.0}, {3.0}};
        std::vector<int> ty{-1, 1, 1, 1};
        GridSearchConfig cfg;
        cfg.folds = 2;
        CHECK_THROWS_AS(grid_search(tiny, ty, cfg, KernelKind::kLinear), std::invalid_argument);
    }
    SUBCASE("results repeat under a fixed seed and parallel evaluation matches") {
        GridSearchConfig cfg;
        cfg.c_grid = {0.5, 5.0};
        cfg.gamma_grid = {{true, 0.0}, {false, 0.2}};
        cfg.folds = 4;
        cfg.seed = 9;
        const auto a = grid_search(X, y, cfg, KernelKind::kRbf, 1);
        const auto b = grid_search(X, y, cfg, KernelKind::kRbf, 1);
        const auto c = grid_search(X, y, cfg, KernelKind::kRbf, 3);
        for (const auto* other : {&b, &c}) {
            CHECK(other->best_c == a.best_c);
            CHECK(other->best_resolved_gamma == a.best_resolved_gamma);
            CHECK(other->best_score == a.best_score);
            REQUIRE(other->cells.size() == a.cells.size());
            for (std::size_t i = 0; i < a.cells.size(); ++i)
                CHECK(other->cells[i].mean_score == a.cells[i].mean_score);
        }
    }
}
