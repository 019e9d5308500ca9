#include <benchmark/benchmark.h>

#include <random>

#include "neuralrank/metrics.hpp"

namespace {

void BM_Silhouette(benchmark::State& state) {
    const auto t = state.range(0);
    const auto jobs = static_cast<unsigned>(state.range(1));
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n(0, 1);
    neuralrank::Matrix x(t, 10);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n(rng);
    std::vector<neuralrank::ClassId> y(t);
    for (std::int64_t i = 0; i < t; ++i) y[i] = i % 10;
    neuralrank::SilhouetteOptions options;
    options.jobs = jobs;
    for (auto _ : state) benchmark::DoNotOptimize(neuralrank::silhouette(x, y, options).score);
    state.SetComplexityN(t);
}

}  // namespace

BENCHMARK(BM_Silhouette)
    ->ArgsProduct({{1000, 2000, 4000, 8000}, {1}})
    ->Unit(benchmark::kMillisecond)
    ->Complexity(benchmark::oNSquared);
BENCHMARK(BM_Silhouette)->Name("BM_SilhouetteThreaded")->Args({8000, 4})->Unit(benchmark::kMillisecond)->UseRealTime();
