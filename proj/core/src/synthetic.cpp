#include "fastmapsvm/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <vector>

#include "fastmapsvm/detail/seed.hpp"

namespace fastmapsvm {

namespace {

constexpr std::uint64_t kSaltNoise = 11;
constexpr std::uint64_t kSaltEvent = 12;
constexpr std::uint64_t kSaltStream = 13;

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Stationary AR(1) sequence with unit-variance innovations, rescaled so the
// emitted samples have unit (population) std.
std::vector<float> ar1_channel(std::size_t n, double phi, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> x(n);
    double prev = gauss(rng) / std::sqrt(1.0 - phi * phi);
    for (std::size_t i = 0; i < n; ++i) {
        prev = phi * prev + gauss(rng);
        x[i] = prev;
    }
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    const double scale = var > 0.0 ? 1.0 / std::sqrt(var) : 1.0;
    std::vector<float> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<float>((x[i] - mean) * scale);
    return out;
}

struct BurstShape {
    double onset_s;
    double freq_hz;
    double decay_s;
};

// Short exponential rise into an exponential decay, normalized to unit peak.
constexpr double kRiseS = 0.08;

double envelope(double u, double decay_s) {
    if (u <= 0.0) return 0.0;
    return (1.0 - std::exp(-u / kRiseS)) * std::exp(-u / decay_s);
}

double envelope_peak(double decay_s) {
    // The maximizer of (1 - e^{-u/r}) e^{-u/d} in closed form.
    const double u = kRiseS * std::log((kRiseS + decay_s) / kRiseS);
    return envelope(u, decay_s);
}

// Adds amp * envelope * sin(2 pi f (t - onset) + phase) to one channel.
void add_burst(std::vector<float>& ch, double fs, const BurstShape& shape, double amp,
               double phase) {
    const double peak = envelope_peak(shape.decay_s);
    const std::size_t first = static_cast<std::size_t>(
        std::max<double>(0.0, std::ceil(shape.onset_s * fs)));
    for (std::size_t i = first; i < ch.size(); ++i) {
        const double u = static_cast<double>(i) / fs - shape.onset_s;
        const double env = envelope(u, shape.decay_s) / peak;
        if (env < 1e-6 && u > shape.decay_s) break;
        ch[i] += static_cast<float>(amp * env * std::sin(kTwoPi * shape.freq_hz * u + phase));
    }
}

}  // namespace

Waveform make_noise_trace(const SyntheticConfig& cfg, std::string id, std::uint64_t seed) {
    const std::size_t n =
        static_cast<std::size_t>(std::llround(cfg.duration_s * cfg.sample_rate_hz));
    std::mt19937_64 rng(seed);
    std::vector<std::vector<float>> channels;
    channels.reserve(cfg.n_channels);
    for (std::size_t l = 0; l < cfg.n_channels; ++l)
        channels.push_back(ar1_channel(n, cfg.ar_phi, rng));
    return Waveform(std::move(id), cfg.sample_rate_hz, std::move(channels));
}

Waveform make_event_trace(const SyntheticConfig& cfg, std::string id, std::uint64_t seed) {
    const std::size_t n =
        static_cast<std::size_t>(std::llround(cfg.duration_s * cfg.sample_rate_hz));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> onset_dist(2.5, 4.5);
    std::uniform_real_distribution<double> freq_dist(cfg.burst_hz - 0.15, cfg.burst_hz + 0.15);
    std::uniform_real_distribution<double> decay_dist(0.9, 1.3);
    std::uniform_real_distribution<double> amp_dist(0.8, 1.2);
    std::uniform_real_distribution<double> phase_dist(-0.3, 0.3);

    BurstShape shape{onset_dist(rng), freq_dist(rng), decay_dist(rng)};
    std::vector<std::vector<float>> channels;
    channels.reserve(cfg.n_channels);
    for (std::size_t l = 0; l < cfg.n_channels; ++l) {
        const double amp = amp_dist(rng);
        const double phase = phase_dist(rng);
        auto ch = ar1_channel(n, cfg.ar_phi, rng);
        for (auto& v : ch) v = static_cast<float>(v * cfg.background_amp);
        add_burst(ch, cfg.sample_rate_hz, shape, amp, phase);
        channels.push_back(std::move(ch));
    }
    return Waveform(std::move(id), cfg.sample_rate_hz, std::move(channels));
}

LabeledWaveformSet make_synthetic_dataset(const SyntheticConfig& cfg, std::size_t n_noise,
                                          std::size_t n_event, std::uint64_t seed) {
    LabeledWaveformSet set({"noise", "event"}, cfg.sample_rate_hz, cfg.n_channels);
    char buf[32];
    for (std::size_t i = 0; i < n_noise; ++i) {
        std::snprintf(buf, sizeof buf, "ns_%04zu", i);
        set.add(make_noise_trace(cfg, buf, detail::mix_seed(detail::mix_seed(seed, kSaltNoise), i)),
                0);
    }
    for (std::size_t i = 0; i < n_event; ++i) {
        std::snprintf(buf, sizeof buf, "ev_%04zu", i);
        set.add(make_event_trace(cfg, buf, detail::mix_seed(detail::mix_seed(seed, kSaltEvent), i)),
                1);
    }
    return set;
}

Waveform make_synthetic_stream(const SyntheticConfig& cfg, double duration_s,
                               std::span<const double> onset_times_s,
                               double peak_over_noise, std::uint64_t seed) {
    const std::size_t n =
        static_cast<std::size_t>(std::llround(duration_s * cfg.sample_rate_hz));
    if (n < 2) throw std::invalid_argument("synthetic: stream too short");
    for (double t : onset_times_s)
        if (!(t >= 0.0) || t >= duration_s)
            throw std::invalid_argument("synthetic: onset outside the stream");

    std::mt19937_64 rng(detail::mix_seed(seed, kSaltStream));
    std::vector<std::vector<float>> channels;
    channels.reserve(cfg.n_channels);
    for (std::size_t l = 0; l < cfg.n_channels; ++l)
        channels.push_back(ar1_channel(n, cfg.ar_phi, rng));

    std::uniform_real_distribution<double> freq_dist(cfg.burst_hz - 0.15, cfg.burst_hz + 0.15);
    std::uniform_real_distribution<double> decay_dist(0.9, 1.3);
    std::uniform_real_distribution<double> amp_dist(0.8, 1.2);
    std::uniform_real_distribution<double> phase_dist(-0.3, 0.3);
    for (double t : onset_times_s) {
        BurstShape shape{t, freq_dist(rng), decay_dist(rng)};
        for (auto& ch : channels)
            add_burst(ch, cfg.sample_rate_hz, shape, peak_over_noise * amp_dist(rng),
                      phase_dist(rng));
    }
    return Waveform("stream", cfg.sample_rate_hz, std::move(channels));
}

}  // namespace fastmapsvm
