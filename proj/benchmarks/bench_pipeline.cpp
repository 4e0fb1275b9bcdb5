#include <benchmark/benchmark.h>

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "fastmapsvm/pipeline.hpp"
#include "fastmapsvm/scanner.hpp"
#include "fastmapsvm/svm.hpp"
#include "fastmapsvm/synthetic.hpp"

namespace {

using namespace fastmapsvm;

void make_blobs(std::uint64_t seed, std::size_t per_class, std::size_t dim,
                std::vector<std::vector<double>>& X, std::vector<int>& y) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    X.clear();
    y.clear();
    for (int cls : {-1, 1}) {
        for (std::size_t i = 0; i < per_class; ++i) {
            std::vector<double> p(dim);
            for (auto& v : p) v = normal(rng) + cls * 1.0;
            X.push_back(std::move(p));
            y.push_back(cls);
        }
    }
}

void BM_TrainSvm(benchmark::State& state) {
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    make_blobs(301, static_cast<std::size_t>(state.range(0)) / 2, 4, X, y);
    const KernelSpec kernel{KernelKind::kRbf, 0.5};
    for (auto _ : state) {
        auto model = train_svm(X, y, 10.0, kernel, 1e-3, 500, 1);
        benchmark::DoNotOptimize(model.bias);
    }
}
BENCHMARK(BM_TrainSvm)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

PipelineConfig bench_config() {
    PipelineConfig config;
    config.dim = 4;
    config.seed = 77;
    return config;
}

const FastMapSVMModel& bench_model() {
    static const FastMapSVMModel model = [] {
        const auto train = make_synthetic_dataset(SyntheticConfig{}, 24, 24, 771);
        return fit(train, bench_config());
    }();
    return model;
}

void BM_PipelineFit(benchmark::State& state) {
    const auto train = make_synthetic_dataset(SyntheticConfig{}, 16, 16, 772);
    const auto config = bench_config();
    for (auto _ : state) {
        auto model = fit(train, config);
        benchmark::DoNotOptimize(model.svm.bias);
    }
}
BENCHMARK(BM_PipelineFit)->Unit(benchmark::kMillisecond);

void BM_PredictRecord(benchmark::State& state) {
    const auto& model = bench_model();
    const auto queries = make_synthetic_dataset(SyntheticConfig{}, 1, 0, 773);
    const std::vector<Waveform> batch{queries.items().front().waveform};
    for (auto _ : state) benchmark::DoNotOptimize(predict(model, batch));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PredictRecord)->Unit(benchmark::kMillisecond);

void BM_ScanStream(benchmark::State& state) {
    const auto& model = bench_model();
    const std::vector<double> onsets{25.0};
    const auto stream = make_synthetic_stream(SyntheticConfig{}, 60.0, onsets, 6.0, 774);
    std::size_t windows = 0;
    for (auto _ : state) {
        auto scores = scan_window_scores(model, stream, 8.0, 2.0);
        windows = scores.size();
        benchmark::DoNotOptimize(scores);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(windows));
}
BENCHMARK(BM_ScanStream)->Unit(benchmark::kMillisecond);

}  // namespace
