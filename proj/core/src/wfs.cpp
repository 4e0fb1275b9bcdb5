#include "fastmapsvm/wfs.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

static_assert(std::endian::native == std::endian::little,
              "wfs payloads are little-endian; big-endian hosts are not supported");

namespace fastmapsvm {

namespace {

constexpr int kFormatVersion = 1;

std::string item_file_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "item_%05zu.f32", index);
    return buf;
}

void write_payload(const std::filesystem::path& path, const Waveform& w) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("wfs: cannot open payload for writing: " + path.string());
    for (const auto& ch : w.channels())
        out.write(reinterpret_cast<const char*>(ch.data()),
                  static_cast<std::streamsize>(ch.size() * sizeof(float)));
    if (!out)
        throw std::runtime_error("wfs: payload write failed: " + path.string());
}

std::vector<std::vector<float>> read_payload(const std::filesystem::path& path,
                                             std::size_t n_channels, std::size_t n_samples) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("wfs: cannot open payload: " + path.string());
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
    const std::size_t expected = n_channels * n_samples * sizeof(float);
    if (bytes.size() != expected)
        throw std::runtime_error("wfs: payload length mismatch: " + path.string());
    std::vector<std::vector<float>> channels(n_channels, std::vector<float>(n_samples));
    const char* p = bytes.data();
    for (auto& ch : channels) {
        std::memcpy(ch.data(), p, n_samples * sizeof(float));
        p += n_samples * sizeof(float);
    }
    return channels;
}

}  // namespace

void save_dataset(const LabeledWaveformSet& set, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::remove_all(dir, ec);
    std::filesystem::create_directories(dir);

    nlohmann::json manifest;
    manifest["format_version"] = kFormatVersion;
    manifest["sample_rate_hz"] = set.sample_rate_hz();
    manifest["n_channels"] = set.n_channels();
    manifest["dtype"] = "f32le";
    manifest["class_names"] = {set.class_names()[0], set.class_names()[1]};
    nlohmann::json items = nlohmann::json::array();
    for (std::size_t i = 0; i < set.size(); ++i) {
        const auto& it = set[i];
        const std::string file = item_file_name(i);
        items.push_back({{"id", it.waveform.id()},
                         {"label", it.label},
                         {"file", file},
                         {"n_samples", it.waveform.n_samples()}});
        write_payload(dir / file, it.waveform);
    }
    manifest["items"] = std::move(items);

    std::ofstream out(dir / "manifest.json", std::ios::trunc);
    if (!out)
        throw std::runtime_error("wfs: cannot write manifest in " + dir.string());
    out << manifest.dump(2) << "\n";
    if (!out)
        throw std::runtime_error("wfs: manifest write failed in " + dir.string());
}

LabeledWaveformSet load_dataset(const std::filesystem::path& dir) {
    const auto manifest_path = dir / "manifest.json";
    if (!std::filesystem::exists(manifest_path))
        throw std::invalid_argument("wfs: missing manifest: " + manifest_path.string());
    std::ifstream in(manifest_path);
    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("wfs: malformed manifest: " + std::string(e.what()));
    }

    try {
        if (manifest.at("format_version").get<int>() != kFormatVersion)
            throw std::runtime_error("wfs: unsupported format_version");
        if (manifest.at("dtype").get<std::string>() != "f32le")
            throw std::runtime_error("wfs: unsupported dtype");
        const double fs = manifest.at("sample_rate_hz").get<double>();
        const std::size_t n_channels = manifest.at("n_channels").get<std::size_t>();
        const auto names = manifest.at("class_names");
        if (!names.is_array() || names.size() != 2)
            throw std::invalid_argument("wfs: class_names must list exactly two classes");
        LabeledWaveformSet set({names[0].get<std::string>(), names[1].get<std::string>()},
                               fs, n_channels);
        for (const auto& item : manifest.at("items")) {
            const int label = item.at("label").get<int>();
            if (label != 0 && label != 1)
                throw std::invalid_argument("binary labels required");
            const std::size_t n_samples = item.at("n_samples").get<std::size_t>();
            auto channels = read_payload(dir / item.at("file").get<std::string>(),
                                         n_channels, n_samples);
            set.add(Waveform(item.at("id").get<std::string>(), fs, std::move(channels)),
                    label);
        }
        return set;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("wfs: malformed manifest: " + std::string(e.what()));
    }
}

}  // namespace fastmapsvm
