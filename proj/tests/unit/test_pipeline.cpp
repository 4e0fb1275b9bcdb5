#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "fastmapsvm/evaluation.hpp"
#include "fastmapsvm/pipeline.hpp"
#include "fastmapsvm/synthetic.hpp"
#include "json.hpp"
#include "support/generators.hpp"

using namespace fastmapsvm;

namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("fms_pipe_" + tag);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

// Training set big enough to separate the two synthetic classes cleanly.
struct Fixture {
    LabeledWaveformSet train, test;
    PipelineConfig config;
    FastMapSVMModel model;

    Fixture() {
        SyntheticConfig cfg;
        train = make_synthetic_dataset(cfg, 64, 64, 3);
        test = make_synthetic_dataset(cfg, 24, 24, 4);
        config.dim = 4;
        config.seed = 17;
        config.grid.c_grid = {1.0, 10.0};
        config.grid.gamma_grid = {{true, 0.0}, {false, 0.1}};
        config.grid.folds = 4;
        model = fit(train, config);
    }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

std::vector<Waveform> waveforms_of(const LabeledWaveformSet& set) {
    std::vector<Waveform> out;
    for (const auto& item : set.items()) out.push_back(item.waveform);
    return out;
}

Waveform scaled_copy(const Waveform& w, float factor) {
    std::vector<std::vector<float>> ch;
    for (std::size_t c = 0; c < w.n_channels(); ++c) {
        const auto span = w.channel(c);
        std::vector<float> v(span.begin(), span.end());
        for (float& x : v) x *= factor;
        ch.push_back(std::move(v));
    }
    return Waveform(w.id(), w.sample_rate_hz(), std::move(ch));
}

// Waveforms whose flattened samples sit on one exact line through the
// origin, so a euclidean embedding has exactly one usable dimension.
LabeledWaveformSet collinear_set(std::size_t n) {
    LabeledWaveformSet set({"a", "b"}, 100.0, 1);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<float> samples(8, 0.0f);
        samples[0] = 3.0f * static_cast<float>(i);
        samples[1] = 4.0f * static_cast<float>(i);
        set.add(Waveform("ln_" + std::to_string(i), 100.0, {samples}),
                static_cast<int>(i % 2));
    }
    return set;
}

}  // namespace

TEST_CASE("training validates data and configuration early") {
    SyntheticConfig cfg;
    cfg.duration_s = 2.0;
    cfg.n_channels = 1;
    const auto tiny = make_synthetic_dataset(cfg, 3, 3, 1);

    PipelineConfig pc;
    pc.dim = 4;  // needs 4 per class, only 3 available
    CHECK_THROWS_WITH_AS(fit(tiny, pc), doctest::Contains("insufficient"),
                         std::invalid_argument);

    pc.dim = 0;
    CHECK_THROWS_AS(fit(tiny, pc), std::invalid_argument);

    pc.dim = 2;
    pc.distance = "cosine";
    CHECK_THROWS_WITH_AS(fit(tiny, pc), doctest::Contains("unknown distance"),
                         std::invalid_argument);
    pc.distance = "edit";
    CHECK_THROWS_AS(fit(tiny, pc), std::invalid_argument);

    // identical waveforms leave no geometry to embed
    LabeledWaveformSet flat({"a", "b"}, 100.0, 1);
    for (int i = 0; i < 8; ++i)
        flat.add(Waveform("f" + std::to_string(i), 100.0,
                          {std::vector<float>{1.0f, 2.0f, 3.0f, 4.0f}}),
                 i % 2);
    PipelineConfig fc;
    fc.dim = 2;
    fc.preprocessing.band_enabled = false;
    fc.preprocessing.demean = false;
    fc.grid.folds = 2;
    fc.grid.c_grid = {1.0};
    CHECK_THROWS_WITH_AS(fit(flat, fc), doctest::Contains("degenerate"), std::invalid_argument);
}

TEST_CASE("the trained model separates the synthetic classes") {
    const auto& f = fixture();
    const auto row = evaluate_model(f.model, f.test, 0.0);
    CHECK(row.metrics.accuracy >= 0.98);
    CHECK(row.auc >= 0.98);

    // structural invariants of the stored model
    CHECK(f.model.embedding.effective_dim == 4);
    CHECK(f.model.raw_refs.size() == 8);
    REQUIRE(f.model.raw_ref_labels.size() == 8);
    for (std::size_t k = 0; k < 4; ++k)
        CHECK(f.model.raw_ref_labels[2 * k] != f.model.raw_ref_labels[2 * k + 1]);
    CHECK(f.model.svm.c == f.model.grid_result.best_c);
    CHECK(f.model.svm.kernel.gamma == f.model.grid_result.best_resolved_gamma);
    CHECK(f.model.scaler_mean.size() == 4);
    CHECK(f.model.scaler_std.size() == 4);
    for (double sd : f.model.scaler_std) CHECK(sd > 0.0);
}

TEST_CASE("prediction is the decision function over scaled coordinates") {
    const auto& f = fixture();
    const auto objs = waveforms_of(f.test);
    const auto preds = predict(f.model, objs);
    const auto coords = embed_scaled(f.model, objs);
    REQUIRE(preds.size() == objs.size());
    REQUIRE(coords.size() == objs.size());
    for (std::size_t i = 0; i < objs.size(); ++i) {
        CHECK(preds[i].score == decision_function(f.model.svm, coords[i]));
        CHECK(preds[i].label == (preds[i].score > 0.0 ? 1 : 0));
        CHECK(coords[i].size() == 4);
    }
    // every reference waveform lands on its own side
    const auto ref_preds = predict(f.model, f.model.raw_refs);
    for (std::size_t i = 0; i < ref_preds.size(); ++i)
        CHECK(ref_preds[i].label == f.model.raw_ref_labels[i]);
}

TEST_CASE("queries must match the training modality") {
    const auto& f = fixture();
    std::mt19937_64 rng(5);
    const auto wrong_ch = testsupport::random_waveform(rng, "w", 2, 800, 100.0);
    CHECK_THROWS_WITH_AS(predict(f.model, std::vector<Waveform>{wrong_ch}),
                         doctest::Contains("channel count"), std::invalid_argument);
    const auto wrong_fs = testsupport::random_waveform(rng, "w", 3, 800, 50.0);
    CHECK_THROWS_WITH_AS(predict(f.model, std::vector<Waveform>{wrong_fs}),
                         doctest::Contains("sample rate"), std::invalid_argument);
}

TEST_CASE("embedding a query costs exactly two distance calls per dimension") {
    const auto& f = fixture();
    auto counted = f.model;  // shallow copy shares everything but lets us swap the functor
    testsupport::CountingDistance counter{counted.distance_fn};
    counted.distance_fn = counter;

    (void)predict(counted, std::vector<Waveform>{f.test[0].waveform});
    CHECK(*counter.calls == 2 * static_cast<std::size_t>(counted.embedding.effective_dim));

    *counter.calls = 0;
    const auto objs = waveforms_of(f.test);
    (void)predict(counted, objs);
    CHECK(*counter.calls ==
          2 * static_cast<std::size_t>(counted.embedding.effective_dim) * objs.size());
}

TEST_CASE("refitting with one seed reproduces the model byte for byte") {
    const auto& f = fixture();
    const auto again = fit(f.train, f.config);

    const auto d1 = fresh_dir("refit_a");
    const auto d2 = fresh_dir("refit_b");
    save_model(f.model, d1);
    save_model(again, d2);
    CHECK(slurp(d1 / "model.json") == slurp(d2 / "model.json"));
    CHECK(slurp(d1 / "refs" / "manifest.json") == slurp(d2 / "refs" / "manifest.json"));
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("a reloaded model scores bit-identically") {
    const auto& f = fixture();
    const auto dir = fresh_dir("roundtrip");
    save_model(f.model, dir);
    const auto loaded = load_model(dir);

    CHECK(loaded.class_names == f.model.class_names);
    CHECK(loaded.sample_rate_hz == f.model.sample_rate_hz);
    CHECK(loaded.n_channels == f.model.n_channels);
    CHECK(loaded.config.dim == f.model.config.dim);
    CHECK(loaded.config.distance == f.model.config.distance);
    CHECK(loaded.svm.bias == f.model.svm.bias);
    CHECK(loaded.grid_result.best_c == f.model.grid_result.best_c);

    const auto objs = waveforms_of(f.test);
    const auto a = predict(f.model, objs);
    const auto b = predict(loaded, objs);
    for (std::size_t i = 0; i < objs.size(); ++i) {
        CHECK(a[i].score == b[i].score);
        CHECK(a[i].label == b[i].label);
    }
    fs::remove_all(dir);
}

TEST_CASE("loading rejects foreign or damaged model files") {
    const auto& f = fixture();
    const auto dir = fresh_dir("damaged");

    CHECK_THROWS_AS(load_model(dir / "nowhere"), std::invalid_argument);

    save_model(f.model, dir);
    auto j = nlohmann::json::parse(slurp(dir / "model.json"));
    j["format_version"] = 9999;
    std::ofstream(dir / "model.json") << j.dump();
    CHECK_THROWS_WITH_AS(load_model(dir), doctest::Contains("format_version"),
                         std::runtime_error);

    std::ofstream(dir / "model.json") << "{not json";
    CHECK_THROWS_AS(load_model(dir), std::runtime_error);
    fs::remove_all(dir);
}

TEST_CASE("dimensions beyond the data's spread scale with unit variance") {
    const auto data = collinear_set(12);
    PipelineConfig pc;
    pc.dim = 2;
    pc.distance = "euclidean";
    pc.preprocessing.demean = false;
    pc.preprocessing.band_enabled = false;
    pc.grid.c_grid = {1.0};
    pc.grid.gamma_grid = {{true, 0.0}};
    pc.grid.folds = 2;
    const auto model = fit(data, pc);
    CHECK(model.embedding.effective_dim == 1);
    CHECK(model.scaler_std[1] == 1.0);
    CHECK(model.scaler_mean[1] == 0.0);
    const auto coords = embed_scaled(model, std::vector<Waveform>{data[3].waveform});
    REQUIRE(coords.size() == 1);
    CHECK(coords[0][1] == 0.0);
    CHECK(std::isfinite(coords[0][0]));
}

TEST_CASE("scaling the input amplitude does not change the call") {
    const auto& f = fixture();
    const auto objs = waveforms_of(f.test);
    const auto base = predict(f.model, objs);

    SUBCASE("a power-of-two gain is invisible down to the last bit") {
        // sample scaling is exact, the distance orientation is gain-stable,
        // and every later operation is homogeneous, so nothing may change
        for (float g : {2.0f, 0.25f}) {
            std::vector<Waveform> scaled;
            for (const auto& w : objs) scaled.push_back(scaled_copy(w, g));
            const auto got = predict(f.model, scaled);
            for (std::size_t i = 0; i < objs.size(); ++i) {
                CHECK(got[i].score == base[i].score);
                CHECK(got[i].label == base[i].label);
            }
        }
    }
    SUBCASE("an arbitrary gain preserves every label") {
        std::vector<Waveform> scaled;
        for (const auto& w : objs) scaled.push_back(scaled_copy(w, 1.7f));
        const auto got = predict(f.model, scaled);
        for (std::size_t i = 0; i < objs.size(); ++i) {
            CHECK(got[i].label == base[i].label);
            CHECK(std::abs(got[i].score - base[i].score) < 1e-6);
        }
    }
}

TEST_CASE("growing the training set keeps the fit well formed") {
    SyntheticConfig cfg;
    cfg.duration_s = 4.0;
    cfg.n_channels = 2;
    const auto small = make_synthetic_dataset(cfg, 12, 12, 9);
    auto big = make_synthetic_dataset(cfg, 12, 12, 9);
    const auto extra = make_synthetic_dataset(cfg, 6, 6, 10);
    for (const auto& item : extra.items()) big.add(item.waveform, item.label);

    PipelineConfig pc;
    pc.dim = 3;
    pc.seed = 2;
    pc.grid.c_grid = {1.0};
    pc.grid.gamma_grid = {{true, 0.0}};
    pc.grid.folds = 2;

    const LabeledWaveformSet* sets[] = {&small, &big};
    for (const auto* data : sets) {
        const auto m = fit(*data, pc);
        CHECK(m.embedding.effective_dim == 3);
        // six distinct references, one of each class per embedding dimension
        std::vector<std::string> ids;
        for (const auto& r : m.raw_refs) ids.push_back(r.id());
        std::sort(ids.begin(), ids.end());
        CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());
        for (std::size_t k = 0; k < 3; ++k)
            CHECK(m.raw_ref_labels[2 * k] + m.raw_ref_labels[2 * k + 1] == 1);
    }
}
