#include "fastmapsvm/filter.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace fastmapsvm {

namespace {

using cplx = std::complex<double>;

// Real-coefficient biquad from a pole pair that is closed under conjugation
// and the fixed zero pair {+1, -1}; the whole-cascade gain lands on the first
// section.
BiquadSection section_from_pole_pair(cplx z1, cplx z2, double gain) {
    BiquadSection s;
    s.b0 = gain;
    s.b1 = 0.0;
    s.b2 = -gain;
    s.a1 = -(z1 + z2).real();
    s.a2 = (z1 * z2).real();
    return s;
}

bool section_stable(const BiquadSection& s) {
    // Schur-Cohn conditions for a real quadratic z^2 + a1 z + a2.
    return s.a2 < 1.0 && std::abs(s.a1) < 1.0 + s.a2;
}

double section_dc_gain(const BiquadSection& s) {
    return (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
}

// Direct form II transposed, single pass over x with the given initial state.
void sosfilt_section(const BiquadSection& s, std::span<double> x, double zi0, double zi1) {
    double z0 = zi0, z1 = zi1;
    for (auto& v : x) {
        const double xin = v;
        const double y = s.b0 * xin + z0;
        z0 = s.b1 * xin - s.a1 * y + z1;
        z1 = s.b2 * xin - s.a2 * y;
        v = y;
    }
}

// Steady-state DF2T state for a unit step input (the sosfilt_zi construction).
void section_step_state(const BiquadSection& s, double& zi0, double& zi1) {
    const double yss = section_dc_gain(s);
    zi1 = s.b2 - s.a2 * yss;
    zi0 = s.b1 - s.a1 * yss + zi1;
}

void sosfilt(const FilterCoefficients& fc, std::span<double> x) {
    // x0 tracks the step amplitude seen by each section so the per-section
    // steady state can be scaled accordingly.
    double x0 = x.empty() ? 0.0 : x.front();
    for (const auto& s : fc.sections) {
        double zi0, zi1;
        section_step_state(s, zi0, zi1);
        sosfilt_section(s, x, zi0 * x0, zi1 * x0);
        x0 *= section_dc_gain(s);
    }
}

}  // namespace

FilterCoefficients design_butterworth_bandpass(double low_hz, double high_hz,
                                               double sample_rate_hz, int poles) {
    if (!(sample_rate_hz > 0.0))
        throw std::invalid_argument("bandpass design: sample rate must be positive");
    if (!(low_hz > 0.0) || !(high_hz > low_hz))
        throw std::invalid_argument("bandpass design: need 0 < low_hz < high_hz");
    if (!(high_hz < sample_rate_hz / 2.0))
        throw std::invalid_argument("bandpass design: high_hz must be below Nyquist");
    if (poles < 2 || poles % 2 != 0)
        throw std::invalid_argument("bandpass design: poles must be even and >= 2");

    const int n = poles / 2;  // analog prototype order
    const double fs2 = 2.0 * sample_rate_hz;

    // Pre-warp the band edges so the bilinear transform lands them exactly.
    const double w1 = fs2 * std::tan(std::numbers::pi * low_hz / sample_rate_hz);
    const double w2 = fs2 * std::tan(std::numbers::pi * high_hz / sample_rate_hz);
    const double bw = w2 - w1;
    const double w0 = std::sqrt(w1 * w2);

    // Lowpass-to-bandpass on the Butterworth prototype: each prototype pole p
    // yields the two roots of s^2 - bw*p*s + w0^2. Only prototype poles with
    // Im(p) >= 0 are visited; each complex one contributes two sections (one
    // per root, paired with its conjugate from the mirrored prototype pole),
    // and the real one (odd prototype order) contributes a single section
    // holding both of its roots.
    std::vector<std::pair<cplx, cplx>> analog_pairs;
    for (int k = 0; k < n; ++k) {
        const double theta = std::numbers::pi * (2.0 * k + n + 1.0) / (2.0 * n);
        const cplx p(std::cos(theta), std::sin(theta));
        if (p.imag() < -1e-12) continue;
        const cplx half = bw * p / 2.0;
        const cplx disc = std::sqrt(half * half - w0 * w0);
        if (p.imag() > 1e-12) {
            analog_pairs.emplace_back(half + disc, std::conj(half + disc));
            analog_pairs.emplace_back(half - disc, std::conj(half - disc));
        } else {
            analog_pairs.emplace_back(half + disc, half - disc);
        }
    }

    // Bilinear transform. The bandpass has n analog zeros at s = 0, which map
    // to z = +1; the remaining n digital zeros sit at z = -1, one of each per
    // section. The gain picks up prod(fs2 - zero) / prod(fs2 - pole).
    const auto bilinear = [fs2](cplx s) { return (fs2 + s) / (fs2 - s); };
    cplx denom = 1.0;
    for (const auto& [s1, s2] : analog_pairs)
        denom *= (fs2 - s1) * (fs2 - s2);
    const double gain = std::pow(bw, n) * std::pow(fs2, n) / denom.real();

    FilterCoefficients fc;
    fc.low_hz = low_hz;
    fc.high_hz = high_hz;
    fc.sample_rate_hz = sample_rate_hz;
    fc.sections.reserve(analog_pairs.size());
    for (std::size_t k = 0; k < analog_pairs.size(); ++k) {
        const double g = (k == 0) ? gain : 1.0;
        fc.sections.push_back(section_from_pole_pair(
            bilinear(analog_pairs[k].first), bilinear(analog_pairs[k].second), g));
    }
    for (const auto& s : fc.sections)
        if (!section_stable(s))
            throw std::runtime_error("bandpass design: unstable section");
    return fc;
}

std::vector<double> filtfilt(const FilterCoefficients& fc, std::span<const double> x) {
    if (fc.sections.empty())
        throw std::invalid_argument("filtfilt: empty filter");
    const std::size_t padlen = static_cast<std::size_t>(3 * fc.order());
    if (x.size() <= padlen)
        throw std::invalid_argument("filtfilt: signal shorter than edge padding");

    const std::size_t n = x.size();
    std::vector<double> ext(n + 2 * padlen);
    // Odd reflection about the end points removes the step the padding would
    // otherwise introduce.
    for (std::size_t j = 0; j < padlen; ++j)
        ext[j] = 2.0 * x[0] - x[padlen - j];
    for (std::size_t i = 0; i < n; ++i)
        ext[padlen + i] = x[i];
    for (std::size_t j = 0; j < padlen; ++j)
        ext[padlen + n + j] = 2.0 * x[n - 1] - x[n - 2 - j];

    sosfilt(fc, ext);
    std::reverse(ext.begin(), ext.end());
    sosfilt(fc, ext);
    std::reverse(ext.begin(), ext.end());

    return std::vector<double>(ext.begin() + static_cast<std::ptrdiff_t>(padlen),
                               ext.begin() + static_cast<std::ptrdiff_t>(padlen + n));
}

Waveform filtfilt(const FilterCoefficients& fc, const Waveform& w) {
    if (w.sample_rate_hz() != fc.sample_rate_hz)
        throw std::invalid_argument("filtfilt: waveform sample rate does not match design rate");
    std::vector<std::vector<float>> out;
    out.reserve(w.n_channels());
    for (const auto& ch : w.channels()) {
        std::vector<double> xd(ch.begin(), ch.end());
        const auto yd = filtfilt(fc, xd);
        std::vector<float> y(yd.size());
        for (std::size_t i = 0; i < yd.size(); ++i)
            y[i] = static_cast<float>(yd[i]);
        out.push_back(std::move(y));
    }
    return w.with_channels(std::move(out));
}

}  // namespace fastmapsvm
