#include <benchmark/benchmark.h>

#include "rwcscope/kmeans.hpp"
#include "rwcscope/pca.hpp"
#include "rwcscope/random.hpp"

using namespace rwcscope;

namespace {

Matrix rwc_like(std::size_t layers, std::size_t transitions) {
  Rng rng(4);
  Matrix m(layers, transitions);
  for (std::size_t l = 0; l < layers; ++l) {
    const double slope = uniform(rng, -0.004, 0.004);
    for (std::size_t t = 0; t < transitions; ++t) {
      m(l, t) = (0.06 + slope * static_cast<double>(t)) * uniform(rng, 0.95, 1.05);
    }
  }
  return m;
}

void BM_FitPca(benchmark::State& state) {
  const auto m = rwc_like(static_cast<std::size_t>(state.range(0)), 24);
  for (auto _ : state) benchmark::DoNotOptimize(fit_pca(m));
}
BENCHMARK(BM_FitPca)->Arg(30)->Arg(300)->Arg(3000);

void BM_KmeansFit(benchmark::State& state) {
  const auto m = rwc_like(static_cast<std::size_t>(state.range(0)), 24);
  for (auto _ : state) benchmark::DoNotOptimize(kmeans_fit(m, 3, 42));
}
BENCHMARK(BM_KmeansFit)->Arg(30)->Arg(300)->Arg(3000)->Unit(benchmark::kMicrosecond);

void BM_Scree(benchmark::State& state) {
  const auto m = rwc_like(static_cast<std::size_t>(state.range(0)), 24);
  for (auto _ : state) benchmark::DoNotOptimize(scree(m, 10, 42));
}
BENCHMARK(BM_Scree)->Arg(30)->Arg(300)->Unit(benchmark::kMillisecond);

}  // namespace
