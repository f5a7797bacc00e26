#include <benchmark/benchmark.h>

#include <random>

#include "dol/kernels.hpp"

namespace {

void BM_PosteriorMean(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  std::mt19937_64 rng(1);
  std::normal_distribution<float> normal;
  std::vector<float> cand(rows * d);
  for (auto& v : cand) v = normal(rng);
  std::vector<double> xt(d), out(d);
  for (auto& v : xt) v = normal(rng);
  dol::KernelWorkspace ws;
  for (auto _ : state) {
    dol::posterior_mean(xt, cand, 1.0, 0.5, dol::SelfPairCorrection{0, 4.0}, out, ws);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows));
}
BENCHMARK(BM_PosteriorMean)->Args({500, 8})->Args({5000, 8})->Args({5000, 64})->Args({1000, 3072});

}  // namespace
