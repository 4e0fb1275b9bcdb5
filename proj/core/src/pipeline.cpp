#include "fastmapsvm/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "fastmapsvm/detail/seed.hpp"
#include "fastmapsvm/filter.hpp"
#include "fastmapsvm/parallel.hpp"
#include "fastmapsvm/wfs.hpp"

namespace fastmapsvm {

namespace {

constexpr int kModelFormatVersion = 1;

// Sub-seed salts; fixed so refits are reproducible.
enum : std::uint64_t { kSeedEmbedding = 1, kSeedGrid = 2, kSeedFinalSvm = 3 };

void check_modality(const FastMapSVMModel& model, const Waveform& w) {
    if (w.n_channels() != model.n_channels)
        throw std::invalid_argument("predict: channel count does not match the model");
    if (w.sample_rate_hz() != model.sample_rate_hz)
        throw std::invalid_argument("predict: sample rate does not match the model");
}

std::vector<double> scale_coords(const FastMapSVMModel& model, std::vector<double> c) {
    for (std::size_t k = 0; k < c.size(); ++k)
        c[k] = (c[k] - model.scaler_mean[k]) / model.scaler_std[k];
    return c;
}

nlohmann::json gamma_to_json(const GammaChoice& g) {
    if (g.scale) return "scale";
    return g.value;
}

GammaChoice gamma_from_json(const nlohmann::json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() != "scale")
            throw std::runtime_error("model: unknown gamma spelling " + j.get<std::string>());
        return GammaChoice{true, 0.0};
    }
    return GammaChoice{false, j.get<double>()};
}

std::string kernel_kind_name(KernelKind k) {
    return k == KernelKind::kRbf ? "rbf" : "linear";
}

KernelKind kernel_kind_from_name(const std::string& s) {
    if (s == "rbf") return KernelKind::kRbf;
    if (s == "linear") return KernelKind::kLinear;
    throw std::runtime_error("model: unknown kernel kind " + s);
}

}  // namespace

Waveform preprocess_waveform(const PreprocessSpec& spec, const Waveform& w) {
    Waveform out = spec.demean ? demean(w) : w;
    if (spec.band_enabled) {
        const auto fc = design_butterworth_bandpass(spec.band_low_hz, spec.band_high_hz,
                                                    w.sample_rate_hz(), spec.poles);
        out = filtfilt(fc, out);
    }
    return out;
}

FastMapSVMModel fit(const LabeledWaveformSet& train, const PipelineConfig& config) {
    if (config.dim < 1) throw std::invalid_argument("fit: dim must be >= 1");
    const auto dist = make_waveform_distance(config.distance);  // validates the name
    const std::size_t k = static_cast<std::size_t>(config.dim);
    if (train.count_label(0) < k || train.count_label(1) < k)
        throw std::invalid_argument("fit: insufficient objects per class for the requested dim");

    const std::size_t n = train.size();
    std::vector<Waveform> pre(n);
    std::vector<int> labels(n);
    parallel_for(n, config.jobs, [&](std::size_t i) {
        pre[i] = preprocess_waveform(config.preprocessing, train[i].waveform);
    });
    for (std::size_t i = 0; i < n; ++i) labels[i] = train[i].label;

    auto fitres = fit_embedding<Waveform>(pre, labels, dist, config.dim,
                                          detail::mix_seed(config.seed, kSeedEmbedding),
                                          1e-12, config.swap_rounds, config.jobs);
    if (fitres.model.effective_dim == 0)
        throw std::invalid_argument("fit: degenerate embedding (effective dimension 0)");
    fitres.model.distance_name = config.distance;

    FastMapSVMModel model;
    model.class_names = train.class_names();
    model.sample_rate_hz = train.sample_rate_hz();
    model.n_channels = train.n_channels();
    model.config = config;
    model.distance_fn = dist;

    // Standardize the embedding coordinates; zero-variance (and zero-filled
    // degenerate) dimensions pass through with std 1.
    model.scaler_mean.assign(k, 0.0);
    model.scaler_std.assign(k, 1.0);
    for (std::size_t d = 0; d < k; ++d) {
        double m = 0.0;
        for (const auto& row : fitres.coords) m += row[d];
        m /= static_cast<double>(n);
        double q = 0.0;
        for (const auto& row : fitres.coords) q += (row[d] - m) * (row[d] - m);
        const double sd = std::sqrt(q / static_cast<double>(n));
        model.scaler_mean[d] = m;
        model.scaler_std[d] = sd > 0.0 ? sd : 1.0;
    }
    std::vector<std::vector<double>> scaled = fitres.coords;
    for (auto& row : scaled)
        for (std::size_t d = 0; d < k; ++d)
            row[d] = (row[d] - model.scaler_mean[d]) / model.scaler_std[d];

    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = labels[i] == 1 ? 1 : -1;

    GridSearchConfig grid = config.grid;
    grid.seed = detail::mix_seed(config.seed, kSeedGrid);
    model.grid_result = grid_search(scaled, y, grid, config.kernel, config.jobs);

    KernelSpec spec;
    spec.kind = config.kernel;
    if (config.kernel == KernelKind::kRbf)
        spec.gamma = model.grid_result.best_resolved_gamma;
    model.svm = train_svm(scaled, y, model.grid_result.best_c, spec, 1e-3, 500,
                          detail::mix_seed(config.seed, kSeedFinalSvm));

    for (const auto& pair : fitres.model.pairs) {
        model.raw_refs.push_back(train[pair.index_a].waveform);
        model.raw_refs.push_back(train[pair.index_b].waveform);
        model.raw_ref_labels.push_back(pair.label_a);
        model.raw_ref_labels.push_back(pair.label_b);
    }
    model.embedding = std::move(fitres.model);
    return model;
}

std::vector<std::vector<double>> embed_scaled(const FastMapSVMModel& model,
                                              std::span<const Waveform> objects) {
    for (const auto& w : objects) check_modality(model, w);
    std::vector<std::vector<double>> out(objects.size());
    parallel_for(objects.size(), model.config.jobs, [&](std::size_t i) {
        const Waveform pre = preprocess_waveform(model.config.preprocessing, objects[i]);
        out[i] = scale_coords(model, embed(model.embedding, model.distance_fn, pre));
    });
    return out;
}

std::vector<Prediction> predict(const FastMapSVMModel& model,
                                std::span<const Waveform> objects) {
    const auto coords = embed_scaled(model, objects);
    std::vector<Prediction> preds(objects.size());
    for (std::size_t i = 0; i < coords.size(); ++i) {
        const double score = decision_function(model.svm, coords[i]);
        preds[i] = Prediction{score > 0.0 ? 1 : 0, score};
    }
    return preds;
}

void save_model(const FastMapSVMModel& model, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::remove_all(dir, ec);
    std::filesystem::create_directories(dir);

    LabeledWaveformSet refs(model.class_names, model.sample_rate_hz, model.n_channels);
    for (std::size_t i = 0; i < model.raw_refs.size(); ++i)
        refs.add(model.raw_refs[i], model.raw_ref_labels[i]);
    save_dataset(refs, dir / "refs");

    nlohmann::json j;
    j["format_version"] = kModelFormatVersion;
    j["class_names"] = {model.class_names[0], model.class_names[1]};
    j["sample_rate_hz"] = model.sample_rate_hz;
    j["n_channels"] = model.n_channels;

    const auto& cfg = model.config;
    nlohmann::json jc;
    jc["dim"] = cfg.dim;
    jc["seed"] = cfg.seed;
    jc["distance"] = cfg.distance;
    jc["kernel"] = kernel_kind_name(cfg.kernel);
    jc["swap_rounds"] = cfg.swap_rounds;
    jc["preprocessing"] = {{"demean", cfg.preprocessing.demean},
                           {"band_enabled", cfg.preprocessing.band_enabled},
                           {"band_low_hz", cfg.preprocessing.band_low_hz},
                           {"band_high_hz", cfg.preprocessing.band_high_hz},
                           {"poles", cfg.preprocessing.poles}};
    nlohmann::json jgamma = nlohmann::json::array();
    for (const auto& g : cfg.grid.gamma_grid) jgamma.push_back(gamma_to_json(g));
    jc["grid"] = {{"c", cfg.grid.c_grid},
                  {"gamma", jgamma},
                  {"folds", cfg.grid.folds},
                  {"scoring", cfg.grid.scoring}};
    j["config"] = std::move(jc);

    nlohmann::json je;
    je["dim"] = model.embedding.dim;
    je["effective_dim"] = model.embedding.effective_dim;
    je["distance_name"] = model.embedding.distance_name;
    je["d_ab"] = model.embedding.pivot_distance;
    nlohmann::json jpairs = nlohmann::json::array();
    for (const auto& p : model.embedding.pairs)
        jpairs.push_back({{"id_a", p.a.id()},
                          {"id_b", p.b.id()},
                          {"label_a", p.label_a},
                          {"label_b", p.label_b},
                          {"index_a", p.index_a},
                          {"index_b", p.index_b},
                          {"coords_a", p.coords_a},
                          {"coords_b", p.coords_b}});
    je["pairs"] = std::move(jpairs);
    j["embedding"] = std::move(je);

    j["scaler"] = {{"mean", model.scaler_mean}, {"std", model.scaler_std}};
    j["svm"] = {{"kernel",
                 {{"kind", kernel_kind_name(model.svm.kernel.kind)},
                  {"gamma", model.svm.kernel.gamma}}},
                {"c", model.svm.c},
                {"bias", model.svm.bias},
                {"dual_coefs", model.svm.dual_coefs},
                {"support_vectors", model.svm.support_vectors}};

    nlohmann::json jcells = nlohmann::json::array();
    for (const auto& cell : model.grid_result.cells)
        jcells.push_back({{"c", cell.c},
                          {"gamma", gamma_to_json(cell.gamma)},
                          {"resolved_gamma", cell.resolved_gamma},
                          {"mean_score", cell.mean_score}});
    j["grid_result"] = {{"best_c", model.grid_result.best_c},
                        {"best_gamma", gamma_to_json(model.grid_result.best_gamma)},
                        {"best_resolved_gamma", model.grid_result.best_resolved_gamma},
                        {"best_score", model.grid_result.best_score},
                        {"cells", std::move(jcells)}};

    std::ofstream out(dir / "model.json", std::ios::trunc);
    if (!out)
        throw std::runtime_error("model: cannot write " + (dir / "model.json").string());
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("model: write failed in " + dir.string());
}

FastMapSVMModel load_model(const std::filesystem::path& dir) {
    const auto json_path = dir / "model.json";
    if (!std::filesystem::exists(json_path))
        throw std::invalid_argument("model: missing model.json: " + json_path.string());
    std::ifstream in(json_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("model: malformed model.json: " + std::string(e.what()));
    }

    try {
        if (j.at("format_version").get<int>() != kModelFormatVersion)
            throw std::runtime_error("model: unsupported format_version");

        FastMapSVMModel model;
        const auto names = j.at("class_names");
        model.class_names = {names.at(0).get<std::string>(), names.at(1).get<std::string>()};
        model.sample_rate_hz = j.at("sample_rate_hz").get<double>();
        model.n_channels = j.at("n_channels").get<std::size_t>();

        const auto& jc = j.at("config");
        model.config.dim = jc.at("dim").get<int>();
        model.config.seed = jc.at("seed").get<std::uint64_t>();
        model.config.distance = jc.at("distance").get<std::string>();
        model.config.kernel = kernel_kind_from_name(jc.at("kernel").get<std::string>());
        model.config.swap_rounds = jc.at("swap_rounds").get<int>();
        const auto& jp = jc.at("preprocessing");
        model.config.preprocessing.demean = jp.at("demean").get<bool>();
        model.config.preprocessing.band_enabled = jp.at("band_enabled").get<bool>();
        model.config.preprocessing.band_low_hz = jp.at("band_low_hz").get<double>();
        model.config.preprocessing.band_high_hz = jp.at("band_high_hz").get<double>();
        model.config.preprocessing.poles = jp.at("poles").get<int>();
        const auto& jg = jc.at("grid");
        model.config.grid.c_grid = jg.at("c").get<std::vector<double>>();
        model.config.grid.gamma_grid.clear();
        for (const auto& g : jg.at("gamma")) model.config.grid.gamma_grid.push_back(gamma_from_json(g));
        model.config.grid.folds = jg.at("folds").get<int>();
        model.config.grid.scoring = jg.at("scoring").get<std::string>();

        const auto& je = j.at("embedding");
        model.embedding.dim = je.at("dim").get<int>();
        model.embedding.effective_dim = je.at("effective_dim").get<int>();
        model.embedding.distance_name = je.at("distance_name").get<std::string>();
        model.embedding.pivot_distance = je.at("d_ab").get<std::vector<double>>();

        model.scaler_mean = j.at("scaler").at("mean").get<std::vector<double>>();
        model.scaler_std = j.at("scaler").at("std").get<std::vector<double>>();

        const auto& js = j.at("svm");
        model.svm.kernel.kind = kernel_kind_from_name(js.at("kernel").at("kind").get<std::string>());
        model.svm.kernel.gamma = js.at("kernel").at("gamma").get<double>();
        model.svm.c = js.at("c").get<double>();
        model.svm.bias = js.at("bias").get<double>();
        model.svm.dual_coefs = js.at("dual_coefs").get<std::vector<double>>();
        model.svm.support_vectors =
            js.at("support_vectors").get<std::vector<std::vector<double>>>();

        const auto& jr = j.at("grid_result");
        model.grid_result.best_c = jr.at("best_c").get<double>();
        model.grid_result.best_gamma = gamma_from_json(jr.at("best_gamma"));
        model.grid_result.best_resolved_gamma = jr.at("best_resolved_gamma").get<double>();
        model.grid_result.best_score = jr.at("best_score").get<double>();
        for (const auto& cell : jr.at("cells")) {
            GridCell c;
            c.c = cell.at("c").get<double>();
            c.gamma = gamma_from_json(cell.at("gamma"));
            c.resolved_gamma = cell.at("resolved_gamma").get<double>();
            c.mean_score = cell.at("mean_score").get<double>();
            model.grid_result.cells.push_back(c);
        }

        const auto refs = load_dataset(dir / "refs");
        const auto& jpairs = je.at("pairs");
        if (refs.size() != jpairs.size() * 2)
            throw std::runtime_error("model: reference count does not match pair table");
        model.distance_fn = make_waveform_distance(model.config.distance);
        for (std::size_t k = 0; k < jpairs.size(); ++k) {
            const auto& p = jpairs[k];
            PivotPair<Waveform> pair;
            model.raw_refs.push_back(refs[2 * k].waveform);
            model.raw_refs.push_back(refs[2 * k + 1].waveform);
            model.raw_ref_labels.push_back(refs[2 * k].label);
            model.raw_ref_labels.push_back(refs[2 * k + 1].label);
            pair.a = preprocess_waveform(model.config.preprocessing, refs[2 * k].waveform);
            pair.b = preprocess_waveform(model.config.preprocessing, refs[2 * k + 1].waveform);
            pair.label_a = p.at("label_a").get<int>();
            pair.label_b = p.at("label_b").get<int>();
            pair.index_a = p.at("index_a").get<std::size_t>();
            pair.index_b = p.at("index_b").get<std::size_t>();
            pair.coords_a = p.at("coords_a").get<std::vector<double>>();
            pair.coords_b = p.at("coords_b").get<std::vector<double>>();
            model.embedding.pairs.push_back(std::move(pair));
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("model: malformed model.json: " + std::string(e.what()));
    }
}

}  // namespace fastmapsvm
