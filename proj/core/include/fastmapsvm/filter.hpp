#ifndef FASTMAPSVM_FILTER_HPP
#define FASTMAPSVM_FILTER_HPP

#include <span>
#include <vector>

#include "fastmapsvm/waveform.hpp"

namespace fastmapsvm {

// One second-order IIR section, normalized so a0 = 1.
struct BiquadSection {
    double b0 = 0.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;
};

struct FilterCoefficients {
    std::vector<BiquadSection> sections;
    double low_hz = 0.0;
    double high_hz = 0.0;
    double sample_rate_hz = 0.0;
    // Total pole count of the cascade.
    int order() const { return static_cast<int>(sections.size()) * 2; }
};

// Digital Butterworth bandpass via the analog prototype and the bilinear
// transform with frequency pre-warping. poles is the total pole count of the
// bandpass filter and must be even and >= 2. Requires
// 0 < low_hz < high_hz < sample_rate_hz / 2. Every returned section is
// verified stable.
FilterCoefficients design_butterworth_bandpass(double low_hz, double high_hz,
                                               double sample_rate_hz, int poles = 4);

// Forward-backward (zero phase) application of the cascade. The signal is
// extended on both ends by odd reflection over 3 * order() samples and each
// pass starts from per-section steady-state initial conditions, so step-like
// inputs do not ring at the edges. Requires x.size() > 3 * order().
std::vector<double> filtfilt(const FilterCoefficients& fc, std::span<const double> x);

// Channel-wise filtfilt; the waveform sample rate must match the design rate.
Waveform filtfilt(const FilterCoefficients& fc, const Waveform& w);

}  // namespace fastmapsvm

#endif
