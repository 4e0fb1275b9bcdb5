#include "fastmapsvm/waveform.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace fastmapsvm {

Waveform::Waveform(std::string id, double sample_rate_hz,
                   std::vector<std::vector<float>> channels)
    : id_(std::move(id)),
      sample_rate_hz_(sample_rate_hz),
      channels_(std::move(channels)) {
    if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_))
        throw std::invalid_argument("waveform: sample rate must be positive");
    if (channels_.empty())
        throw std::invalid_argument("waveform: at least one channel required");
    const std::size_t n = channels_.front().size();
    if (n < 2)
        throw std::invalid_argument("waveform: at least two samples per channel required");
    for (const auto& ch : channels_) {
        if (ch.size() != n)
            throw std::invalid_argument("waveform: channels must have equal length");
        for (float v : ch)
            if (!std::isfinite(v))
                throw std::invalid_argument("waveform: samples must be finite");
    }
}

std::span<const float> Waveform::channel(std::size_t l) const {
    if (l >= channels_.size())
        throw std::out_of_range("waveform: channel index out of range");
    return channels_[l];
}

Waveform Waveform::with_channels(std::vector<std::vector<float>> channels) const {
    return Waveform(id_, sample_rate_hz_, std::move(channels));
}

LabeledWaveformSet::LabeledWaveformSet(std::array<std::string, 2> class_names,
                                       double sample_rate_hz, std::size_t n_channels)
    : class_names_(std::move(class_names)),
      sample_rate_hz_(sample_rate_hz),
      n_channels_(n_channels) {
    if (!(sample_rate_hz_ > 0.0))
        throw std::invalid_argument("waveform set: sample rate must be positive");
    if (n_channels_ == 0)
        throw std::invalid_argument("waveform set: channel count must be positive");
}

void LabeledWaveformSet::add(Waveform w, int label) {
    if (label != 0 && label != 1)
        throw std::invalid_argument("binary labels required");
    if (w.sample_rate_hz() != sample_rate_hz_)
        throw std::invalid_argument("waveform set: sample rate mismatch");
    if (w.n_channels() != n_channels_)
        throw std::invalid_argument("waveform set: channel count mismatch");
    items_.push_back({std::move(w), label});
}

std::size_t LabeledWaveformSet::count_label(int label) const {
    std::size_t c = 0;
    for (const auto& it : items_)
        if (it.label == label) ++c;
    return c;
}

namespace detail {

double channel_mean(std::span<const float> x) {
    double s = 0.0;
    for (float v : x) s += v;
    return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

double channel_std(std::span<const float> x) {
    if (x.empty()) return 0.0;
    const double m = channel_mean(x);
    double s = 0.0;
    for (float v : x) {
        const double d = v - m;
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(x.size()));
}

}  // namespace detail

Waveform demean(const Waveform& w) {
    std::vector<std::vector<float>> out;
    out.reserve(w.n_channels());
    for (const auto& ch : w.channels()) {
        const double m = detail::channel_mean(ch);
        std::vector<float> y(ch.size());
        for (std::size_t i = 0; i < ch.size(); ++i)
            y[i] = static_cast<float>(ch[i] - m);
        out.push_back(std::move(y));
    }
    return w.with_channels(std::move(out));
}

Waveform circular_shift(const Waveform& w, double offset_s) {
    if (!std::isfinite(offset_s))
        throw std::invalid_argument("circular_shift: offset must be finite");
    if (std::abs(offset_s) > w.duration_s())
        throw std::invalid_argument("circular_shift: offset exceeds waveform duration");
    const long long n = static_cast<long long>(w.n_samples());
    long long k = std::llround(offset_s * w.sample_rate_hz());
    k = ((k % n) + n) % n;
    if (k == 0) return w;
    std::vector<std::vector<float>> out;
    out.reserve(w.n_channels());
    for (const auto& ch : w.channels()) {
        std::vector<float> y(ch.size());
        for (long long i = 0; i < n; ++i)
            y[static_cast<std::size_t>((i + k) % n)] = ch[static_cast<std::size_t>(i)];
        out.push_back(std::move(y));
    }
    return w.with_channels(std::move(out));
}

Waveform add_gaussian_noise(const Waveform& w, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw std::invalid_argument("add_gaussian_noise: sigma must be non-negative");
    if (sigma == 0.0) return w;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::vector<float>> out;
    out.reserve(w.n_channels());
    for (const auto& ch : w.channels()) {
        const double scale = sigma * detail::channel_std(ch);
        std::vector<float> y(ch.size());
        for (std::size_t i = 0; i < ch.size(); ++i)
            y[i] = static_cast<float>(ch[i] + scale * gauss(rng));
        out.push_back(std::move(y));
    }
    return w.with_channels(std::move(out));
}

Waveform normalize_max_amplitude(const Waveform& w) {
    std::vector<std::vector<float>> out;
    out.reserve(w.n_channels());
    for (const auto& ch : w.channels()) {
        double amax = 0.0;
        for (float v : ch) amax = std::max(amax, std::abs(static_cast<double>(v)));
        std::vector<float> y(ch.begin(), ch.end());
        if (amax > 0.0)
            for (auto& v : y) v = static_cast<float>(v / amax);
        out.push_back(std::move(y));
    }
    return w.with_channels(std::move(out));
}

}  // namespace fastmapsvm
