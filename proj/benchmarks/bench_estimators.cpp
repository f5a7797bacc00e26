#include <benchmark/benchmark.h>

#include "dol/estimators.hpp"
#include "dol/ingest.hpp"

namespace {

const dol::Dataset& gaussian() {
  static const auto ds = dol::generate({dol::IsotropicGaussian{{}, 1.0}, 2000, 8, 3});
  return ds;
}

void BM_CdolPoint(benchmark::State& state) {
  dol::EstimatorConfig cfg;
  cfg.subset_size = static_cast<std::size_t>(state.range(0));
  cfg.max_repeats = 1;
  for (auto _ : state) {
    auto b = dol::estimate_B_cdol(gaussian(), {1.0, 1.0}, cfg);
    benchmark::DoNotOptimize(b.b_hat);
  }
}
BENCHMARK(BM_CdolPoint)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_FullPoint(benchmark::State& state) {
  dol::EstimatorConfig cfg;
  cfg.xt_samples = 1000;
  for (auto _ : state) {
    auto b = dol::estimate_B_full(gaussian(), {1.0, 1.0}, cfg);
    benchmark::DoNotOptimize(b.b_hat);
  }
}
BENCHMARK(BM_FullPoint)->Unit(benchmark::kMillisecond);

void BM_EstimateA(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(dol::estimate_A(gaussian()));
}
BENCHMARK(BM_EstimateA);

}  // namespace
