#include <benchmark/benchmark.h>

#include "rwcscope/random.hpp"
#include "rwcscope/rwc.hpp"

using namespace rwcscope;

namespace {

std::vector<WeightSnapshot> make_run(std::size_t layers, std::size_t params, std::size_t epochs) {
  Rng rng(1);
  std::vector<WeightSnapshot> run(epochs);
  for (std::size_t e = 0; e < epochs; ++e) {
    run[e].epoch_index = static_cast<std::uint32_t>(e);
    for (std::size_t l = 0; l < layers; ++l) {
      LayerTensor t{"layer" + std::to_string(l), DType::F64, {static_cast<std::uint32_t>(params)}, {}};
      t.values.resize(params);
      for (auto& v : t.values) v = uniform(rng, -1.0, 1.0);
      run[e].layers.push_back(std::move(t));
    }
  }
  return run;
}

void BM_RwcLayer(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = uniform(rng, -1.0, 1.0);
    b[i] = a[i] + uniform(rng, -0.01, 0.01);
  }
  for (auto _ : state) benchmark::DoNotOptimize(rwc_layer(a, b));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * n * 2 * sizeof(double)));
}
BENCHMARK(BM_RwcLayer)->Range(1 << 10, 1 << 20);

void BM_BuildRwcMatrix(benchmark::State& state) {
  const auto run = make_run(static_cast<std::size_t>(state.range(0)), 4096, 26);
  for (auto _ : state) benchmark::DoNotOptimize(build_rwc_matrix(run));
}
BENCHMARK(BM_BuildRwcMatrix)->Arg(10)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_ClampOutliers(benchmark::State& state) {
  Rng rng(3);
  RwcMatrix m;
  const auto layers = static_cast<std::size_t>(state.range(0));
  m.values = Matrix(layers, 25);
  for (std::size_t l = 0; l < layers; ++l) m.layer_names.push_back("l" + std::to_string(l));
  for (auto& v : m.values.data()) v = uniform(rng, 0.0, 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(clamp_outliers(m, {}));
}
BENCHMARK(BM_ClampOutliers)->Arg(50)->Arg(500);

}  // namespace
