#ifndef FASTMAPSVM_TESTS_ORACLES_HPP
#define FASTMAPSVM_TESTS_ORACLES_HPP

// Independent reference implementations the tests compare the library
// against. Everything here favors the most literal transcription of the
// definitions over speed; none of it shares code with the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "fastmapsvm/filter.hpp"
#include "fastmapsvm/svm.hpp"
#include "fastmapsvm/waveform.hpp"

namespace testsupport {

// Population standard deviation, written out longhand.
inline double population_std(std::span<const float> x) {
    double mean = 0.0;
    for (float v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double acc = 0.0;
    for (float v : x) acc += (static_cast<double>(v) - mean) * (static_cast<double>(v) - mean);
    return std::sqrt(acc / static_cast<double>(x.size()));
}

// Literal double-loop normalized cross-correlation trace:
//   r[tau] = 1/(n_i sigma_i sigma_j) * sum_{m=0}^{n_i-1} oi[m] * oj_hat[m + l - tau]
// with l = (n_j - n_j mod 2)/2 - (n_i mod 2)(1 - n_j mod 2) and oj_hat
// zero-padded outside [0, n_j). Requires n_i >= n_j.
inline std::vector<double> ncc_trace_oracle(std::span<const float> oi,
                                            std::span<const float> oj) {
    const long long ni = static_cast<long long>(oi.size());
    const long long nj = static_cast<long long>(oj.size());
    const long long l = (nj - nj % 2) / 2 - (ni % 2) * (1 - nj % 2);
    const double si = population_std(oi);
    const double sj = population_std(oj);
    std::vector<double> r(oi.size(), 0.0);
    if (si == 0.0 || sj == 0.0) return r;
    for (long long tau = 0; tau < ni; ++tau) {
        double acc = 0.0;
        for (long long m = 0; m < ni; ++m) {
            const long long idx = m + l - tau;
            if (idx < 0 || idx >= nj) continue;
            acc += static_cast<double>(oi[static_cast<std::size_t>(m)]) *
                   static_cast<double>(oj[static_cast<std::size_t>(idx)]);
        }
        r[static_cast<std::size_t>(tau)] = acc / (static_cast<double>(ni) * si * sj);
    }
    return r;
}

// Multichannel correlation distance, literal form: one shared lag, channel
// traces summed, 1 - max|sum|/L, clamped into [0, 1]. Requires the first
// argument to be the longer waveform.
inline double ncc_distance_oracle(const fastmapsvm::Waveform& oi,
                                  const fastmapsvm::Waveform& oj) {
    std::vector<double> acc(oi.n_samples(), 0.0);
    for (std::size_t l = 0; l < oi.n_channels(); ++l) {
        const auto tr = ncc_trace_oracle(oi.channel(l), oj.channel(l));
        for (std::size_t t = 0; t < tr.size(); ++t) acc[t] += tr[t];
    }
    double peak = 0.0;
    for (double v : acc) peak = std::max(peak, std::abs(v));
    const double d = 1.0 - peak / static_cast<double>(oi.n_channels());
    return std::min(1.0, std::max(0.0, d));
}

// Pair-counting AUC: over every (positive, negative) pair, count 2 for a
// correctly ordered pair and 1 for a tie, then divide once. Integer
// accumulation keeps the result exactly comparable with the library.
inline double auc_pair_count_oracle(std::span<const double> scores,
                                    std::span<const int> labels) {
    unsigned long long wins2 = 0, pos = 0, neg = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1) continue;
        ++pos;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] == 1) continue;
            if (scores[i] > scores[j])
                wins2 += 2;
            else if (scores[i] == scores[j])
                wins2 += 1;
        }
    }
    for (int lb : labels)
        if (lb != 1) ++neg;
    return static_cast<double>(wins2) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

// Full-table Levenshtein distance.
inline std::size_t levenshtein_oracle(std::string_view s, std::string_view t) {
    const std::size_t n = s.size(), m = t.size();
    std::vector<std::vector<std::size_t>> d(n + 1, std::vector<std::size_t>(m + 1, 0));
    for (std::size_t i = 0; i <= n; ++i) d[i][0] = i;
    for (std::size_t j = 0; j <= m; ++j) d[0][j] = j;
    for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = 1; j <= m; ++j)
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                                d[i - 1][j - 1] + (s[i - 1] == t[j - 1] ? 0u : 1u)});
    return d[n][m];
}

// Magnitude of the cascade's transfer function at frequency f, evaluated on
// the unit circle.
inline double cascade_gain(const fastmapsvm::FilterCoefficients& fc, double f_hz) {
    const std::complex<double> z =
        std::exp(std::complex<double>(0.0, -2.0 * 3.14159265358979323846 * f_hz /
                                               fc.sample_rate_hz));
    std::complex<double> h(1.0, 0.0);
    for (const auto& s : fc.sections) {
        const auto num = s.b0 + s.b1 * z + s.b2 * z * z;
        const auto den = 1.0 + s.a1 * z + s.a2 * z * z;
        h *= num / den;
    }
    return std::abs(h);
}

// Largest KKT violation of a trained model over its training data. alpha_i
// is recovered by matching training rows against the stored support vectors
// (training rows are copied verbatim into the model, so exact comparison is
// sound for continuous random data).
inline double kkt_max_residual(const fastmapsvm::SVMModel& model,
                               const std::vector<std::vector<double>>& X,
                               std::span<const int> y) {
    std::vector<char> taken(model.support_vectors.size(), 0);
    double worst = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        double alpha = 0.0;
        for (std::size_t s = 0; s < model.support_vectors.size(); ++s) {
            if (taken[s] || model.support_vectors[s] != X[i]) continue;
            taken[s] = 1;
            alpha = std::abs(model.dual_coefs[s]);
            break;
        }
        const double yf = static_cast<double>(y[i]) * decision_function(model, X[i]);
        double r = 0.0;
        if (alpha <= 0.0)
            r = std::max(0.0, 1.0 - yf);  // alpha = 0: y f >= 1
        else if (alpha < model.c - 1e-10)
            r = std::abs(yf - 1.0);  // free vector: y f = 1
        else
            r = std::max(0.0, yf - 1.0);  // alpha = C: y f <= 1
        worst = std::max(worst, r);
    }
    return worst;
}

}  // namespace testsupport

#endif
