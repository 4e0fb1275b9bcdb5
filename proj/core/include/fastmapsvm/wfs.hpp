#ifndef FASTMAPSVM_WFS_HPP
#define FASTMAPSVM_WFS_HPP

#include <filesystem>

#include "fastmapsvm/waveform.hpp"

namespace fastmapsvm {

// On-disk dataset layout: a directory holding manifest.json plus one raw
// payload file per item (little-endian float32, channel-major). The manifest
// records format_version, sample_rate_hz, n_channels, dtype, the two class
// names and an item table {id, label, file, n_samples}.

// Replaces dir if it already exists.
void save_dataset(const LabeledWaveformSet& set, const std::filesystem::path& dir);

// Throws std::invalid_argument for a missing manifest or non-binary labels,
// std::runtime_error for version mismatches and payload length mismatches.
LabeledWaveformSet load_dataset(const std::filesystem::path& dir);

}  // namespace fastmapsvm

#endif
