#include <benchmark/benchmark.h>

#include <cmath>

#include "dol/scaling.hpp"

namespace {

void BM_OffsetSearch(benchmark::State& state) {
  std::vector<dol::CurvePoint> pts;
  const int n = static_cast<int>(state.range(0));
  for (int i = 0; i < n; ++i) {
    const double f = std::pow(10.0, 17.0 + 4.0 * i / (n - 1));
    pts.push_back({f, 0.3675 * std::pow(f, -0.014) + 0.015});
  }
  for (auto _ : state) {
    auto fit = dol::fit_offset_power_law(pts);
    benchmark::DoNotOptimize(fit.j_star_offset);
  }
}
BENCHMARK(BM_OffsetSearch)->Arg(20)->Arg(200);

}  // namespace
