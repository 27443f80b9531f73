#include <benchmark/benchmark.h>

#include <vector>

#include "pce/data.hpp"
#include "pce/graph.hpp"
#include "pce/pce.hpp"

namespace {

pce::Matrix bench_data(pce::Index m, pce::Index n) {
  const pce::Index dim = 8;
  const pce::Index classes = 8;
  pce::SubspaceSpec spec;
  spec.ambient = m;
  for (pce::Index c = 0; c < classes; ++c) spec.subspaces.push_back({dim, n / classes});
  const pce::LabeledDataset ds = pce::generate_union_of_subspaces(spec, 1);
  return pce::add_gaussian_noise(ds.matrix, 1e-3, std::nullopt, 2);
}

void BM_SkinnySvd(benchmark::State& state) {
  const pce::Matrix d = bench_data(256, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(pce::skinny_svd(d));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SkinnySvd)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_EstimateDimension(benchmark::State& state) {
  std::vector<double> sigma(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < sigma.size(); ++i) sigma[i] = 1.0 / static_cast<double>(i + 1);
  for (auto _ : state) benchmark::DoNotOptimize(pce::estimate_dimension(sigma, 100.0));
}
BENCHMARK(BM_EstimateDimension)->Arg(64)->Arg(1024)->Arg(16384);

void BM_Fit(benchmark::State& state) {
  const pce::Matrix d = bench_data(256, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(pce::fit(d, 1.0));
}
BENCHMARK(BM_Fit)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_LleGraph(benchmark::State& state) {
  const pce::Matrix d = bench_data(64, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(pce::lle_graph(d, pce::LleConfig{}));
}
BENCHMARK(BM_LleGraph)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
