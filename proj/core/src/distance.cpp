#include "fastmapsvm/distance.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "fastmapsvm/detail/fft.hpp"

namespace fastmapsvm {

namespace {

// Below this O_i length the direct path wins; fixed so that path choice (and
// therefore rounding) is a pure function of the input sizes.
constexpr std::size_t kDirectCutoff = 64;

long long lag_origin(std::size_t ni, std::size_t nj) {
    const long long nim = static_cast<long long>(ni % 2);
    const long long njm = static_cast<long long>(nj % 2);
    return (static_cast<long long>(nj) - njm) / 2 - nim * (1 - njm);
}

std::pair<double, double> mean_std(std::span<const float> x) {
    double s = 0.0;
    for (float v : x) s += v;
    const double m = s / static_cast<double>(x.size());
    double q = 0.0;
    for (float v : x) {
        const double d = v - m;
        q += d * d;
    }
    return {m, std::sqrt(q / static_cast<double>(x.size()))};
}

// Raw lag sums r[s] = sum_m oi[m] * oj[m - s] for s = tau - l, tau in
// [0, ni-1]; normalization is applied by the caller.
std::vector<double> lag_sums_direct(std::span<const float> oi, std::span<const float> oj,
                                    long long l) {
    const long long ni = static_cast<long long>(oi.size());
    const long long nj = static_cast<long long>(oj.size());
    std::vector<double> r(oi.size());
    for (long long tau = 0; tau < ni; ++tau) {
        const long long s = tau - l;
        const long long m0 = std::max<long long>(0, s);
        const long long m1 = std::min(ni - 1, s + nj - 1);
        double acc = 0.0;
        for (long long m = m0; m <= m1; ++m)
            acc += static_cast<double>(oi[static_cast<std::size_t>(m)]) *
                   static_cast<double>(oj[static_cast<std::size_t>(m - s)]);
        r[static_cast<std::size_t>(tau)] = acc;
    }
    return r;
}

std::vector<double> lag_sums_fft(std::span<const float> oi, std::span<const float> oj,
                                 long long l) {
    const std::size_t m = detail::next_pow2(oi.size() + oj.size() - 1);
    std::vector<std::complex<double>> a(m), b(m);
    for (std::size_t k = 0; k < oi.size(); ++k) a[k] = static_cast<double>(oi[k]);
    for (std::size_t k = 0; k < oj.size(); ++k) b[k] = static_cast<double>(oj[k]);
    detail::fft(a, false);
    detail::fft(b, false);
    for (std::size_t k = 0; k < m; ++k) a[k] *= std::conj(b[k]);
    detail::fft(a, true);
    const long long mm = static_cast<long long>(m);
    std::vector<double> r(oi.size());
    for (long long tau = 0; tau < static_cast<long long>(oi.size()); ++tau) {
        const long long s = tau - l;
        r[static_cast<std::size_t>(tau)] = a[static_cast<std::size_t>(((s % mm) + mm) % mm)].real();
    }
    return r;
}

std::vector<double> lag_sums(std::span<const float> oi, std::span<const float> oj,
                             long long l, CorrPath path) {
    if (path == CorrPath::kAuto)
        path = oi.size() < kDirectCutoff ? CorrPath::kDirect : CorrPath::kFft;
    return path == CorrPath::kDirect ? lag_sums_direct(oi, oj, l)
                                     : lag_sums_fft(oi, oj, l);
}

void check_ncc_sizes(std::size_t ni, std::size_t nj) {
    if (nj < 2)
        throw std::invalid_argument("ncc: traces need at least two samples");
    if (ni < nj)
        throw std::invalid_argument("ncc: first trace must be at least as long as the second");
}

int sample_sign(float v) { return (v > 0.0f) - (v < 0.0f); }

// Orders a pair of equal-length traces by their sign patterns, falling back
// to the sample values only when every sign matches. Comparing signs instead
// of raw values keeps the orientation stable under positive amplitude gains,
// so a rescaled query correlates against a reference in the same direction
// and sees the same lag grid.
bool sign_lex_order(std::span<const float> a, std::span<const float> b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        const int sa = sample_sign(a[i]);
        const int sb = sample_sign(b[i]);
        if (sa != sb) return sa > sb;
    }
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return a[i] > b[i];
    return true;  // identical contents, order is irrelevant
}

// Orders a pair of waveforms so the correlation sees the longer one first;
// equal lengths fall back to the sign-then-value comparison, which makes the
// distance exactly symmetric. Returns true if (a, b) is already the
// canonical order.
bool canonical_order(const Waveform& a, const Waveform& b) {
    if (a.n_samples() != b.n_samples()) return a.n_samples() > b.n_samples();
    for (std::size_t l = 0; l < a.n_channels(); ++l) {
        const auto ca = a.channel(l);
        const auto cb = b.channel(l);
        for (std::size_t i = 0; i < ca.size(); ++i) {
            const int sa = sample_sign(ca[i]);
            const int sb = sample_sign(cb[i]);
            if (sa != sb) return sa > sb;
        }
    }
    for (std::size_t l = 0; l < a.n_channels(); ++l) {
        const auto ca = a.channel(l);
        const auto cb = b.channel(l);
        for (std::size_t i = 0; i < ca.size(); ++i)
            if (ca[i] != cb[i]) return ca[i] > cb[i];
    }
    return true;  // identical contents, order is irrelevant
}

bool canonical_order(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return sign_lex_order(a, b);
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace

std::vector<double> ncc(std::span<const float> oi, std::span<const float> oj, CorrPath path) {
    check_ncc_sizes(oi.size(), oj.size());
    const auto [mi, si] = mean_std(oi);
    const auto [mj, sj] = mean_std(oj);
    (void)mi;
    (void)mj;
    if (si == 0.0 || sj == 0.0)
        return std::vector<double>(oi.size(), 0.0);
    auto r = lag_sums(oi, oj, lag_origin(oi.size(), oj.size()), path);
    const double norm = 1.0 / (static_cast<double>(oi.size()) * si * sj);
    for (auto& v : r) v *= norm;
    return r;
}

double ncc_distance_1c(std::span<const float> a, std::span<const float> b, CorrPath path) {
    if (!canonical_order(a, b)) std::swap(a, b);
    const auto trace = ncc(a, b, path);
    double peak = 0.0;
    for (double v : trace) peak = std::max(peak, std::abs(v));
    return clamp01(1.0 - peak);
}

double ncc_distance(const Waveform& a, const Waveform& b, CorrPath path) {
    if (a.n_channels() != b.n_channels())
        throw std::invalid_argument("ncc distance: channel count mismatch");
    if (a.sample_rate_hz() != b.sample_rate_hz())
        throw std::invalid_argument("ncc distance: sample rate mismatch");
    const bool keep = canonical_order(a, b);
    const Waveform& oi = keep ? a : b;
    const Waveform& oj = keep ? b : a;

    const std::size_t n_lags = oi.n_samples();
    std::vector<double> acc(n_lags, 0.0);
    for (std::size_t l = 0; l < oi.n_channels(); ++l) {
        const auto trace = ncc(oi.channel(l), oj.channel(l), path);
        for (std::size_t t = 0; t < n_lags; ++t) acc[t] += trace[t];
    }
    double peak = 0.0;
    for (double v : acc) peak = std::max(peak, std::abs(v));
    return clamp01(1.0 - peak / static_cast<double>(oi.n_channels()));
}

double euclidean_distance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw std::invalid_argument("euclidean distance: dimension mismatch");
    double q = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        q += d * d;
    }
    return std::sqrt(q);
}

double euclidean_distance(const Waveform& a, const Waveform& b) {
    if (a.n_channels() != b.n_channels() || a.n_samples() != b.n_samples())
        throw std::invalid_argument("euclidean distance: waveform shapes must match");
    double q = 0.0;
    for (std::size_t l = 0; l < a.n_channels(); ++l) {
        const auto ca = a.channel(l);
        const auto cb = b.channel(l);
        for (std::size_t i = 0; i < ca.size(); ++i) {
            const double d = static_cast<double>(ca[i]) - static_cast<double>(cb[i]);
            q += d * d;
        }
    }
    return std::sqrt(q);
}

std::size_t edit_distance(std::string_view s, std::string_view t) {
    const std::size_t n = s.size(), m = t.size();
    std::vector<std::size_t> prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= m; ++j) {
            const std::size_t sub = prev[j - 1] + (s[i - 1] == t[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

const std::vector<std::string>& distance_names() {
    static const std::vector<std::string> names = {"ncc", "euclidean", "edit"};
    return names;
}

WaveformDistance make_waveform_distance(const std::string& name) {
    if (name == "ncc")
        return [](const Waveform& a, const Waveform& b) { return ncc_distance(a, b); };
    if (name == "euclidean")
        return [](const Waveform& a, const Waveform& b) { return euclidean_distance(a, b); };
    if (name == "edit")
        throw std::invalid_argument("distance 'edit' does not apply to waveforms");
    throw std::invalid_argument("unknown distance: " + name);
}

}  // namespace fastmapsvm
