#ifndef FASTMAPSVM_PIPELINE_HPP
#define FASTMAPSVM_PIPELINE_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fastmapsvm/distance.hpp"
#include "fastmapsvm/fastmap.hpp"
#include "fastmapsvm/svm.hpp"
#include "fastmapsvm/waveform.hpp"

namespace fastmapsvm {

struct PreprocessSpec {
    bool demean = true;
    bool band_enabled = true;
    double band_low_hz = 1.0;
    double band_high_hz = 20.0;
    int poles = 4;
};

struct PipelineConfig {
    int dim = 8;  // embedding dimension K
    std::uint64_t seed = 0;
    std::string distance = "ncc";
    KernelKind kernel = KernelKind::kRbf;
    PreprocessSpec preprocessing;
    GridSearchConfig grid;  // grid.seed is ignored; sub-seeds derive from seed
    int swap_rounds = 1;
    int jobs = 1;
};

// The trained two-stage model. Reference waveforms are kept twice: raw_refs
// holds them exactly as they appeared in the training set (that is what gets
// serialized), while embedding holds their preprocessed form actually used
// for distance evaluation at query time.
struct FastMapSVMModel {
    std::array<std::string, 2> class_names{"0", "1"};
    double sample_rate_hz = 0.0;
    std::size_t n_channels = 0;
    PipelineConfig config;
    EmbeddingModel<Waveform> embedding;
    std::vector<Waveform> raw_refs;  // pair order a0, b0, a1, b1, ...
    std::vector<int> raw_ref_labels;
    std::vector<double> scaler_mean, scaler_std;  // degenerate dims carry std 1
    SVMModel svm;
    GridSearchResult grid_result;
    // Runtime distance; rebuilt from config.distance on load. Kept as a
    // member so tests can wrap it with a counting instrument.
    WaveformDistance distance_fn;
};

// Applies the recorded preprocessing (demean, then bandpass when enabled) to
// one waveform at the given sample rate.
Waveform preprocess_waveform(const PreprocessSpec& spec, const Waveform& w);

// Preprocess, embed, standardize, grid-search, train. Throws
// std::invalid_argument for insufficient per-class data, an unusable distance
// name, or a fully degenerate embedding.
FastMapSVMModel fit(const LabeledWaveformSet& train, const PipelineConfig& config);

struct Prediction {
    int label = 0;  // 1 when the decision score is strictly positive
    double score = 0.0;
};

// Each object is preprocessed exactly as at training time, embedded with
// 2K distance evaluations, scaled, and scored. Objects must match the
// training modality (channel count and sample rate).
std::vector<Prediction> predict(const FastMapSVMModel& model,
                                std::span<const Waveform> objects);

// Standardized embedding coordinates (the SVM's input space), one row per
// object; used for coordinate export and decision-surface sampling.
std::vector<std::vector<double>> embed_scaled(const FastMapSVMModel& model,
                                              std::span<const Waveform> objects);

// Persistence: a directory with model.json plus refs/ holding the reference
// waveforms in dataset format. Loading replays preprocessing on the stored
// references, so a loaded model scores bit-identically to the saved one.
void save_model(const FastMapSVMModel& model, const std::filesystem::path& dir);
FastMapSVMModel load_model(const std::filesystem::path& dir);

}  // namespace fastmapsvm

#endif
