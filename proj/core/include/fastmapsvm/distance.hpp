#ifndef FASTMAPSVM_DISTANCE_HPP
#define FASTMAPSVM_DISTANCE_HPP

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fastmapsvm/waveform.hpp"

namespace fastmapsvm {

enum class CorrPath {
    kAuto,    // direct summation for short inputs, transform otherwise
    kDirect,  // O(n_i * n_j) summation
    kFft,     // circular correlation over the next power of two >= n_i + n_j - 1
};

// Normalized cross-correlation trace of O_j against O_i, evaluated at lags
// tau = 0 .. n_i - 1. The lag origin is offset by
//   l = (n_j - n_j % 2) / 2 - (n_i % 2) * (1 - n_j % 2)
// so that tau = l corresponds to aligned starts, and each lag value is the
// overlap sum divided by n_i * sigma_i * sigma_j (population standard
// deviations of the full traces). Requires n_i >= n_j >= 2; callers swap
// their arguments if needed. If either trace has zero variance the whole
// trace is zero.
std::vector<double> ncc(std::span<const float> oi, std::span<const float> oj,
                        CorrPath path = CorrPath::kAuto);

// 1 - max_tau |ncc|, clamped to [0, 1]. Argument order does not matter: the
// pair is canonicalized internally (longer trace first; equal lengths fall
// back to a lexicographic rule) so the result is exactly symmetric.
double ncc_distance_1c(std::span<const float> a, std::span<const float> b,
                       CorrPath path = CorrPath::kAuto);

// Multichannel form: 1 - (1/L) max_tau |sum over channels of the per-channel
// traces|, one shared lag across channels, clamped to [0, 1]. Channel counts
// and sample rates must match; sample counts may differ.
double ncc_distance(const Waveform& a, const Waveform& b,
                    CorrPath path = CorrPath::kAuto);

double euclidean_distance(std::span<const double> x, std::span<const double> y);

// Flattened sample-wise L2 over all channels; shapes must match exactly.
double euclidean_distance(const Waveform& a, const Waveform& b);

// Levenshtein distance with unit insert/delete/substitute costs.
std::size_t edit_distance(std::string_view s, std::string_view t);

using WaveformDistance = std::function<double(const Waveform&, const Waveform&)>;

// Registered names, in registry order: "ncc", "euclidean", "edit".
const std::vector<std::string>& distance_names();

// Resolves a registry name to a waveform distance. "edit" is a registered
// name but has no waveform form, so asking for it here is an error.
WaveformDistance make_waveform_distance(const std::string& name);

}  // namespace fastmapsvm

#endif
