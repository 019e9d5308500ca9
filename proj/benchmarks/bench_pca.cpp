#include <benchmark/benchmark.h>

#include <random>

#include "neuralrank/reduction.hpp"

namespace {

void BM_PcaFit(benchmark::State& state) {
    const auto t = state.range(0);
    const auto d = state.range(1);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> n(0, 1);
    neuralrank::Matrix x(t, d);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n(rng);
    for (auto _ : state) benchmark::DoNotOptimize(neuralrank::pca_fit_transform(x, 10).reduced.data());
}

}  // namespace

BENCHMARK(BM_PcaFit)->Args({1000, 128})->Args({5000, 512})->Args({10000, 1024})->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
