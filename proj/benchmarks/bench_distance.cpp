#include <benchmark/benchmark.h>

#include <cstddef>
#include <random>
#include <vector>

#include "fastmapsvm/distance.hpp"
#include "fastmapsvm/waveform.hpp"

namespace {

using namespace fastmapsvm;

std::vector<float> random_trace(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> normal;
    std::vector<float> t(n);
    for (auto& v : t) v = static_cast<float>(normal(rng));
    return t;
}

Waveform random_waveform(std::mt19937_64& rng, std::size_t channels, std::size_t n) {
    std::vector<std::vector<float>> ch(channels);
    for (auto& c : ch) c = random_trace(rng, n);
    return Waveform("bench", 100.0, std::move(ch));
}

void BM_NccDirect(benchmark::State& state) {
    std::mt19937_64 rng(101);
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = random_trace(rng, n);
    const auto b = random_trace(rng, n);
    for (auto _ : state) benchmark::DoNotOptimize(ncc_distance_1c(a, b, CorrPath::kDirect));
}
BENCHMARK(BM_NccDirect)->Arg(256)->Arg(1024)->Arg(4096);

void BM_NccFft(benchmark::State& state) {
    std::mt19937_64 rng(102);
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = random_trace(rng, n);
    const auto b = random_trace(rng, n);
    for (auto _ : state) benchmark::DoNotOptimize(ncc_distance_1c(a, b, CorrPath::kFft));
}
BENCHMARK(BM_NccFft)->Arg(256)->Arg(1024)->Arg(4096)->Arg(16384);

void BM_NccAuto(benchmark::State& state) {
    std::mt19937_64 rng(103);
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = random_trace(rng, n);
    const auto b = random_trace(rng, n);
    for (auto _ : state) benchmark::DoNotOptimize(ncc_distance_1c(a, b, CorrPath::kAuto));
}
BENCHMARK(BM_NccAuto)->Arg(256)->Arg(1024)->Arg(4096)->Arg(16384);

// The pipeline's record shape: three channels of eight seconds at 100 Hz.
void BM_NccRecordPair(benchmark::State& state) {
    std::mt19937_64 rng(104);
    const auto a = random_waveform(rng, 3, 800);
    const auto b = random_waveform(rng, 3, 800);
    for (auto _ : state) benchmark::DoNotOptimize(ncc_distance(a, b));
}
BENCHMARK(BM_NccRecordPair);

void BM_EuclideanRecordPair(benchmark::State& state) {
    std::mt19937_64 rng(105);
    const auto a = random_waveform(rng, 3, 800);
    const auto b = random_waveform(rng, 3, 800);
    for (auto _ : state) benchmark::DoNotOptimize(euclidean_distance(a, b));
}
BENCHMARK(BM_EuclideanRecordPair);

}  // namespace
