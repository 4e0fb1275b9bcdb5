#ifndef FASTMAPSVM_WAVEFORM_HPP
#define FASTMAPSVM_WAVEFORM_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fastmapsvm {

// Multichannel time series sampled at a uniform rate. Samples are stored as
// float32; all numeric processing upstream happens in double and is rounded
// once on the way in.
class Waveform {
public:
    Waveform() = default;

    // Throws std::invalid_argument unless every channel has the same length
    // n >= 2, there is at least one channel, the rate is positive and every
    // sample is finite.
    Waveform(std::string id, double sample_rate_hz,
             std::vector<std::vector<float>> channels);

    const std::string& id() const { return id_; }
    double sample_rate_hz() const { return sample_rate_hz_; }
    std::size_t n_channels() const { return channels_.size(); }
    std::size_t n_samples() const {
        return channels_.empty() ? 0 : channels_.front().size();
    }
    double duration_s() const {
        return sample_rate_hz_ > 0 ? static_cast<double>(n_samples()) / sample_rate_hz_ : 0.0;
    }

    std::span<const float> channel(std::size_t l) const;
    const std::vector<std::vector<float>>& channels() const { return channels_; }

    Waveform with_channels(std::vector<std::vector<float>> channels) const;

private:
    std::string id_;
    double sample_rate_hz_ = 0.0;
    std::vector<std::vector<float>> channels_;
};

struct LabeledItem {
    Waveform waveform;
    int label = 0;  // 0 or 1
};

// Homogeneous collection of labeled waveforms. Channel count and sample rate
// are fixed at construction so that an empty set still has a definite
// modality; per-item sample counts may differ.
class LabeledWaveformSet {
public:
    LabeledWaveformSet() = default;
    LabeledWaveformSet(std::array<std::string, 2> class_names,
                       double sample_rate_hz, std::size_t n_channels);

    // Throws std::invalid_argument if the label is not 0/1 or the waveform
    // does not match the set's rate and channel count.
    void add(Waveform w, int label);

    const std::array<std::string, 2>& class_names() const { return class_names_; }
    double sample_rate_hz() const { return sample_rate_hz_; }
    std::size_t n_channels() const { return n_channels_; }
    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }
    const LabeledItem& operator[](std::size_t i) const { return items_[i]; }
    const std::vector<LabeledItem>& items() const { return items_; }

    std::size_t count_label(int label) const;

private:
    std::array<std::string, 2> class_names_{"0", "1"};
    double sample_rate_hz_ = 0.0;
    std::size_t n_channels_ = 0;
    std::vector<LabeledItem> items_;
};

// Subtracts the per-channel mean.
Waveform demean(const Waveform& w);

// Rotates every channel by round(offset_s * sample_rate) samples. Positive
// offsets move content later in time, so [1,2,3,4] shifted by one sample
// becomes [4,1,2,3]. |offset_s| must not exceed the waveform duration.
Waveform circular_shift(const Waveform& w, double offset_s);

// Adds zero-mean Gaussian noise whose standard deviation is sigma times the
// population standard deviation of each channel. sigma = 0 returns the input
// unchanged; identical seeds give identical output.
Waveform add_gaussian_noise(const Waveform& w, double sigma, std::uint64_t seed);

// Scales each channel so that its maximum absolute sample is one. All-zero
// channels are left untouched.
Waveform normalize_max_amplitude(const Waveform& w);

namespace detail {
// Population mean / standard deviation of one channel, computed in double.
double channel_mean(std::span<const float> x);
double channel_std(std::span<const float> x);
}  // namespace detail

}  // namespace fastmapsvm

#endif
