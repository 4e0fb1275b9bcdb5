#include "fastmapsvm/scanner.hpp"

#include <cmath>
#include <stdexcept>

#include "fastmapsvm/detail/format.hpp"

namespace fastmapsvm {

std::vector<WindowScore> scan_window_scores(const FastMapSVMModel& model,
                                            const Waveform& stream, double window_s,
                                            double stride_s) {
    if (stream.n_channels() != model.n_channels)
        throw std::invalid_argument("scan: stream channel count does not match the model");
    if (stream.sample_rate_hz() != model.sample_rate_hz)
        throw std::invalid_argument("scan: stream sample rate does not match the model");
    if (!(stride_s > 0.0)) throw std::invalid_argument("scan: stride must be positive");
    if (!(window_s > 0.0)) throw std::invalid_argument("scan: window must be positive");

    const double fs = stream.sample_rate_hz();
    const std::size_t window_n = static_cast<std::size_t>(std::llround(window_s * fs));
    const std::size_t stride_n = static_cast<std::size_t>(std::llround(stride_s * fs));
    if (window_n < 2) throw std::invalid_argument("scan: window too short");
    if (stride_n < 1) throw std::invalid_argument("scan: stride shorter than one sample");
    if (window_n > stream.n_samples())
        throw std::invalid_argument("scan: window longer than stream");

    std::vector<std::size_t> offsets;
    for (std::size_t off = 0; off + window_n <= stream.n_samples(); off += stride_n)
        offsets.push_back(off);

    std::vector<Waveform> windows;
    windows.reserve(offsets.size());
    for (std::size_t off : offsets) {
        std::vector<std::vector<float>> channels;
        channels.reserve(stream.n_channels());
        for (const auto& ch : stream.channels())
            channels.emplace_back(ch.begin() + static_cast<std::ptrdiff_t>(off),
                                  ch.begin() + static_cast<std::ptrdiff_t>(off + window_n));
        windows.emplace_back("window_" + std::to_string(off), fs, std::move(channels));
    }

    const auto preds = predict(model, windows);
    std::vector<WindowScore> scores(offsets.size());
    for (std::size_t i = 0; i < offsets.size(); ++i) {
        scores[i].start_s = static_cast<double>(offsets[i]) / fs;
        scores[i].end_s = static_cast<double>(offsets[i] + window_n) / fs;
        scores[i].score = preds[i].score;
    }
    return scores;
}

std::vector<Detection> merge_hits(std::span<const WindowScore> windows, double stride_s,
                                  double threshold) {
    std::vector<Detection> out;
    for (const auto& w : windows) {
        if (!(w.score > threshold) || !(w.score > 0.0)) continue;
        if (!out.empty() && w.start_s - out.back().end_s < stride_s) {
            auto& d = out.back();
            d.end_s = std::max(d.end_s, w.end_s);
            d.score = std::max(d.score, w.score);
            ++d.window_count;
        } else {
            out.push_back({w.start_s, w.end_s, w.score, 1});
        }
    }
    return out;
}

std::vector<Detection> scan(const FastMapSVMModel& model, const Waveform& stream,
                            double window_s, double stride_s, double threshold) {
    return merge_hits(scan_window_scores(model, stream, window_s, stride_s), stride_s,
                      threshold);
}

std::string detections_csv(std::span<const Detection> detections) {
    std::string csv = "start_s,end_s,score,window_count\n";
    for (const auto& d : detections) {
        csv += detail::format_double(d.start_s);
        csv += ',';
        csv += detail::format_double(d.end_s);
        csv += ',';
        csv += detail::format_double(d.score);
        csv += ',';
        csv += std::to_string(d.window_count);
        csv += '\n';
    }
    return csv;
}

}  // namespace fastmapsvm
