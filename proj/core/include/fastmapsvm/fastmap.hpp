#ifndef FASTMAPSVM_FASTMAP_HPP
#define FASTMAPSVM_FASTMAP_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fastmapsvm/detail/seed.hpp"
#include "fastmapsvm/parallel.hpp"

namespace fastmapsvm {

template <class Object>
using DistanceFn = std::function<double(const Object&, const Object&)>;

// One projection axis: the two reference objects that define it, kept with
// their labels, training-set indices and final K-dimensional coordinates.
template <class Object>
struct PivotPair {
    Object a, b;
    int label_a = 0, label_b = 0;
    std::size_t index_a = 0, index_b = 0;
    std::vector<double> coords_a, coords_b;
};

template <class Object>
struct EmbeddingModel {
    int dim = 0;            // requested dimension count K
    int effective_dim = 0;  // dimensions actually carrying geometry
    std::string distance_name;
    std::vector<PivotPair<Object>> pairs;   // one per effective dimension
    std::vector<double> pivot_distance;     // d_ab per effective dimension
};

struct EmbeddedPoint {
    std::string id;
    std::vector<double> coords;
};

// Projection of an object onto the a--b axis from its distances to both
// pivots. The value is deliberately not clamped to [0, d_ab]: distance
// functions that violate the triangle inequality produce out-of-segment
// projections and those carry information.
inline double project(double d_ai, double d_ab, double d_ib) {
    if (!(d_ab > 0.0))
        throw std::invalid_argument("project: pivot distance must be positive");
    return (d_ai * d_ai + d_ab * d_ab - d_ib * d_ib) / (2.0 * d_ab);
}

// Squared residual distance after the first k projection axes have been
// peeled off, floored at zero. ci/cj must expose at least k coordinates.
template <class Object>
double residual_sq_distance(const DistanceFn<Object>& dist,
                            std::span<const double> ci, std::span<const double> cj,
                            const Object& oi, const Object& oj, std::size_t k) {
    if (ci.size() < k || cj.size() < k)
        throw std::invalid_argument("residual distance: coordinate prefix shorter than k");
    const double d = dist(oi, oj);
    double q = d * d;
    for (std::size_t m = 0; m < k; ++m) {
        const double diff = ci[m] - cj[m];
        q -= diff * diff;
    }
    return q > 0.0 ? q : 0.0;
}

struct PivotChoice {
    std::size_t a = 0;
    std::size_t b = 0;
};

namespace detail {

// Argmax of resid(candidate, anchor) over unused objects with label
// opposite_of, ascending scan so ties resolve to the lowest index. Returns
// the winning index and its residual distance.
template <class Resid>
std::pair<std::size_t, double> farthest_opposite(std::span<const int> labels,
                                                 const std::vector<char>& used,
                                                 const Resid& resid,
                                                 std::size_t anchor, int anchor_label) {
    std::size_t best = labels.size();
    double best_d = -1.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (used[i] || labels[i] == anchor_label) continue;
        const double d = resid(i, anchor);
        if (d > best_d) {
            best_d = d;
            best = i;
        }
    }
    if (best == labels.size())
        throw std::invalid_argument("pivot selection: class exhausted");
    return {best, best_d};
}

}  // namespace detail

// Pivot-changing heuristic starting from a given object b0: pick a as the
// farthest unused opposite-class object from b0, then reassign b as the
// farthest unused opposite-class object from a; one such full swap per round.
template <class Resid>
PivotChoice choose_pivot_pair_from(std::size_t b0, std::span<const int> labels,
                                   const std::vector<char>& used, const Resid& resid,
                                   int swap_rounds = 1) {
    if (swap_rounds < 1)
        throw std::invalid_argument("pivot selection: swap_rounds must be >= 1");
    PivotChoice c{b0, b0};
    for (int round = 0; round < swap_rounds; ++round) {
        c.a = detail::farthest_opposite(labels, used, resid, c.b, labels[c.b]).first;
        c.b = detail::farthest_opposite(labels, used, resid, c.a, labels[c.a]).first;
    }
    return c;
}

// Same heuristic with b0 drawn uniformly at random among unused objects.
template <class Resid>
PivotChoice choose_pivot_pair(std::span<const int> labels, const std::vector<char>& used,
                              const Resid& resid, std::uint64_t seed, int swap_rounds = 1) {
    std::vector<std::size_t> unused;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (!used[i]) unused.push_back(i);
    if (unused.empty())
        throw std::invalid_argument("pivot selection: no unused objects");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, unused.size() - 1);
    return choose_pivot_pair_from(unused[pick(rng)], labels, used, resid, swap_rounds);
}

template <class Object>
struct FitResult {
    EmbeddingModel<Object> model;
    // One row per training object, model.dim coordinates each.
    std::vector<std::vector<double>> coords;
};

// Builds a K-dimensional embedding of the training objects. Iteration k picks
// an opposite-class pivot pair under the residual distance, records d_ab, and
// projects every object onto the new axis. If the best available pair is
// closer than epsilon the remaining dimensions stay zero and the model
// records the effective dimension instead of failing.
template <class Object>
FitResult<Object> fit_embedding(std::span<const Object> objects, std::span<const int> labels,
                                const DistanceFn<Object>& dist, int K, std::uint64_t seed,
                                double epsilon = 1e-12, int swap_rounds = 1, int jobs = 1) {
    const std::size_t n = objects.size();
    if (labels.size() != n)
        throw std::invalid_argument("fit_embedding: labels/objects size mismatch");
    if (K < 1) throw std::invalid_argument("fit_embedding: K must be >= 1");
    std::size_t per_class[2] = {0, 0};
    for (int lb : labels) {
        if (lb != 0 && lb != 1)
            throw std::invalid_argument("fit_embedding: binary labels required");
        ++per_class[lb];
    }
    if (per_class[0] < static_cast<std::size_t>(K) ||
        per_class[1] < static_cast<std::size_t>(K))
        throw std::invalid_argument("fit_embedding: insufficient objects per class");

    FitResult<Object> out;
    out.model.dim = K;
    out.coords.assign(n, std::vector<double>(static_cast<std::size_t>(K), 0.0));
    std::vector<char> used(n, 0);

    const auto resid_at = [&](std::size_t k) {
        return [&, k](std::size_t i, std::size_t j) {
            return std::sqrt(residual_sq_distance<Object>(
                dist, out.coords[i], out.coords[j], objects[i], objects[j], k));
        };
    };

    int effective = K;
    for (int k = 0; k < K; ++k) {
        const auto resid = resid_at(static_cast<std::size_t>(k));
        const auto choice = choose_pivot_pair(labels, used, resid,
                                              detail::mix_seed(seed, static_cast<std::uint64_t>(k)),
                                              swap_rounds);
        const double d_ab = resid(choice.b, choice.a);
        if (!(d_ab > epsilon)) {
            effective = k;
            break;
        }
        used[choice.a] = used[choice.b] = 1;

        PivotPair<Object> pair;
        pair.a = objects[choice.a];
        pair.b = objects[choice.b];
        pair.label_a = labels[choice.a];
        pair.label_b = labels[choice.b];
        pair.index_a = choice.a;
        pair.index_b = choice.b;
        out.model.pairs.push_back(std::move(pair));
        out.model.pivot_distance.push_back(d_ab);

        parallel_for(n, jobs, [&](std::size_t i) {
            const double d_ai = std::sqrt(residual_sq_distance<Object>(
                dist, out.coords[i], out.coords[choice.a], objects[i], objects[choice.a],
                static_cast<std::size_t>(k)));
            const double d_ib = std::sqrt(residual_sq_distance<Object>(
                dist, out.coords[i], out.coords[choice.b], objects[i], objects[choice.b],
                static_cast<std::size_t>(k)));
            out.coords[i][static_cast<std::size_t>(k)] = project(d_ai, d_ab, d_ib);
        });
    }
    out.model.effective_dim = effective;
    for (std::size_t k = 0; k < out.model.pairs.size(); ++k) {
        out.model.pairs[k].coords_a = out.coords[out.model.pairs[k].index_a];
        out.model.pairs[k].coords_b = out.coords[out.model.pairs[k].index_b];
    }
    return out;
}

// Embeds a query object with exactly 2 * effective_dim distance evaluations,
// reusing the stored pivot coordinates for the residual recursion. The query
// path repeats the fit path's arithmetic, so training objects reproduce their
// training coordinates.
template <class Object>
std::vector<double> embed(const EmbeddingModel<Object>& model, const DistanceFn<Object>& dist,
                          const Object& o) {
    if (model.effective_dim < 1)
        throw std::invalid_argument("embed: degenerate model (effective dimension 0)");
    std::vector<double> q(static_cast<std::size_t>(model.dim), 0.0);
    for (int k = 0; k < model.effective_dim; ++k) {
        const auto& pair = model.pairs[static_cast<std::size_t>(k)];
        const double d_a = std::sqrt(residual_sq_distance<Object>(
            dist, q, pair.coords_a, o, pair.a, static_cast<std::size_t>(k)));
        const double d_b = std::sqrt(residual_sq_distance<Object>(
            dist, q, pair.coords_b, o, pair.b, static_cast<std::size_t>(k)));
        q[static_cast<std::size_t>(k)] =
            project(d_a, model.pivot_distance[static_cast<std::size_t>(k)], d_b);
    }
    return q;
}

template <class Object>
EmbeddedPoint embed_point(const EmbeddingModel<Object>& model, const DistanceFn<Object>& dist,
                          const Object& o, std::string id = "") {
    return EmbeddedPoint{std::move(id), embed(model, dist, o)};
}

}  // namespace fastmapsvm

#endif
