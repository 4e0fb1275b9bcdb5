#ifndef FASTMAPSVM_SYNTHETIC_HPP
#define FASTMAPSVM_SYNTHETIC_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "fastmapsvm/waveform.hpp"

namespace fastmapsvm {

// Generator settings for the bundled test corpus: multi-channel records at a
// fixed rate, a slowly wandering AR(1) background, and stereotyped damped
// oscillation bursts near burst_hz.
struct SyntheticConfig {
    double sample_rate_hz = 100.0;
    double duration_s = 8.0;
    std::size_t n_channels = 3;
    double ar_phi = 0.98;          // background autocorrelation per sample
    double background_amp = 0.12;  // background std inside event traces, relative to burst peak
    double burst_hz = 5.0;         // nominal oscillation frequency of a burst
};

// One background-only record: per-channel AR(1) driven by unit normal
// innovations, rescaled to unit sample std.
Waveform make_noise_trace(const SyntheticConfig& cfg, std::string id, std::uint64_t seed);

// One event record: a damped oscillation burst with a short rise, onset
// between 2.5 s and 4.5 s, on top of a scaled background. Channels share the
// burst onset and frequency but carry individual amplitude and phase jitter.
Waveform make_event_trace(const SyntheticConfig& cfg, std::string id, std::uint64_t seed);

// n_noise background records (ids ns_0000, ns_0001, ...) followed by n_event
// burst records (ids ev_0000, ...). Class names are {"noise", "event"}.
LabeledWaveformSet make_synthetic_dataset(const SyntheticConfig& cfg, std::size_t n_noise,
                                          std::size_t n_event, std::uint64_t seed);

// A continuous background record of the given length with one burst added per
// onset time. Burst peaks reach peak_over_noise times the background std.
// Onsets must leave room for the burst within the record.
Waveform make_synthetic_stream(const SyntheticConfig& cfg, double duration_s,
                               std::span<const double> onset_times_s,
                               double peak_over_noise, std::uint64_t seed);

}  // namespace fastmapsvm

#endif
