#ifndef FASTMAPSVM_SCANNER_HPP
#define FASTMAPSVM_SCANNER_HPP

#include <span>
#include <string>
#include <vector>

#include "fastmapsvm/pipeline.hpp"
#include "fastmapsvm/waveform.hpp"

namespace fastmapsvm {

struct WindowScore {
    double start_s = 0.0, end_s = 0.0;
    double score = 0.0;
};

struct Detection {
    double start_s = 0.0, end_s = 0.0;
    double score = 0.0;     // max decision value among contributing windows
    int window_count = 0;   // raw hit windows merged into this detection
};

// Scores every window of length window_s at offsets 0, stride_s, 2*stride_s,
// ... against the model (each window runs through the model's recorded
// preprocessing inside predict). The stream must match the model's modality
// and be at least one window long.
std::vector<WindowScore> scan_window_scores(const FastMapSVMModel& model,
                                            const Waveform& stream, double window_s,
                                            double stride_s);

// Windows with score > threshold and a positive label (score > 0) are hits;
// hits that overlap or sit closer than stride_s merge into one detection.
std::vector<Detection> merge_hits(std::span<const WindowScore> windows, double stride_s,
                                  double threshold);

std::vector<Detection> scan(const FastMapSVMModel& model, const Waveform& stream,
                            double window_s = 8.0, double stride_s = 2.0,
                            double threshold = 0.0);

// CSV with header start_s,end_s,score,window_count
std::string detections_csv(std::span<const Detection> detections);

}  // namespace fastmapsvm

#endif
