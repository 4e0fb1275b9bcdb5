#include <benchmark/benchmark.h>

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "fastmapsvm/distance.hpp"
#include "fastmapsvm/fastmap.hpp"
#include "fastmapsvm/waveform.hpp"

namespace {

using namespace fastmapsvm;

std::vector<Waveform> random_records(std::uint64_t seed, std::size_t n) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<Waveform> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::vector<float>> ch(3);
        for (auto& c : ch) {
            c.resize(800);
            for (auto& v : c) v = static_cast<float>(normal(rng));
        }
        out.emplace_back("r" + std::to_string(i), 100.0, std::move(ch));
    }
    return out;
}

std::vector<int> alternating_labels(std::size_t n) {
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % 2);
    return labels;
}

void BM_FitEmbedding(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto objects = random_records(201, n);
    const auto labels = alternating_labels(n);
    const DistanceFn<Waveform> dist = [](const Waveform& a, const Waveform& b) {
        return ncc_distance(a, b);
    };
    for (auto _ : state) {
        auto fit = fit_embedding<Waveform>(objects, labels, dist, 8, 42);
        benchmark::DoNotOptimize(fit.coords);
    }
}
BENCHMARK(BM_FitEmbedding)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

// Query-time embedding cost is two distance evaluations per effective
// dimension, so the argument sweep should scale close to linearly.
void BM_EmbedRecord(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    const auto objects = random_records(202, 48);
    const auto labels = alternating_labels(48);
    const DistanceFn<Waveform> dist = [](const Waveform& a, const Waveform& b) {
        return ncc_distance(a, b);
    };
    const auto fit = fit_embedding<Waveform>(objects, labels, dist, k, 42);
    const auto query = random_records(203, 1);
    for (auto _ : state) benchmark::DoNotOptimize(embed(fit.model, dist, query.front()));
}
BENCHMARK(BM_EmbedRecord)->Arg(2)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace
