#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dol/errors.hpp"
#include "dol/scaling.hpp"

using namespace dol;

namespace {

std::vector<CurvePoint> power_law(double beta, double alpha, double offset, double lo = 17, double hi = 21,
                                  int n = 20) {
  std::vector<CurvePoint> pts;
  for (int i = 0; i < n; ++i) {
    const double f = std::pow(10.0, lo + (hi - lo) * i / (n - 1));
    pts.push_back({f, beta * std::pow(f, alpha) + offset});
  }
  return pts;
}

}  // namespace

TEST(Envelope, RunningMinimum) {
  const TrainingCurve c{"a", {{1, 3}, {2, 2}, {3, 2.5}}};
  const auto env = envelope({c});
  ASSERT_EQ(env.size(), 3u);
  EXPECT_EQ(env[2].flops, 3.0);
  EXPECT_EQ(env[2].loss, 2.0);
  const TrainingCurve mono{"m", {{1, 3}, {2, 2}, {5, 1}}};
  const auto same = envelope({mono});
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(same[i].loss, mono.points[i].loss);
  EXPECT_THROW(envelope({}), InputError);
}

TEST(Envelope, SwitchoverAtCrossing) {
  // Small model: 3 - log10 F / 10; large model: 4 - 2 log10 F / 10. They
  // cross at F = 1e10, after which the large model is lower.
  TrainingCurve small{"small", {}}, large{"large", {}};
  for (int e = 1; e <= 18; ++e) {
    const double f = std::pow(10.0, e);
    small.points.push_back({f, 3.0 - e / 10.0});
    large.points.push_back({f, 4.0 - 2.0 * e / 10.0});
  }
  const auto env = envelope({small, large});
  for (const auto& p : env) {
    const double e = std::log10(p.flops);
    const double best = std::min(3.0 - e / 10.0, 4.0 - 2.0 * e / 10.0);
    EXPECT_NEAR(p.loss, best, 1e-12);
    // Up to the crossing the small model holds the minimum.
    if (e <= 10) EXPECT_NEAR(p.loss, 3.0 - e / 10.0, 1e-12);
  }
  const auto reversed = envelope({large, small});
  ASSERT_EQ(env.size(), reversed.size());
  for (std::size_t i = 0; i < env.size(); ++i) {
    EXPECT_EQ(env[i].flops, reversed[i].flops);
    EXPECT_EQ(env[i].loss, reversed[i].loss);
  }
}

TEST(Envelope, OrderInvariantOnInterleavedCurves) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  std::vector<TrainingCurve> curves;
  for (int c = 0; c < 5; ++c) {
    TrainingCurve t{"c" + std::to_string(c), {}};
    double f = u(rng);
    for (int i = 0; i < 30; ++i) {
      f *= 1.0 + u(rng);
      t.points.push_back({f, u(rng) + 1.0 / (1 + i)});
    }
    curves.push_back(t);
  }
  const auto a = envelope(curves);
  std::reverse(curves.begin(), curves.end());
  std::swap(curves[0], curves[2]);
  const auto b = envelope(curves);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].flops, b[i].flops);
    EXPECT_EQ(a[i].loss, b[i].loss);
    if (i > 0) EXPECT_LE(a[i].loss, a[i - 1].loss);
  }
}

TEST(TrainingCurve, Validation) {
  EXPECT_THROW((TrainingCurve{"x", {{2, 1}, {1, 1}}}.validate()), InputError);
  EXPECT_THROW((TrainingCurve{"x", {{1, -1}}}.validate()), InputError);
  EXPECT_THROW((TrainingCurve{"x", {}}.validate()), InputError);
}

TEST(PowerLawFit, RecoversHeadlineFit) {
  const auto fit = fit_offset_power_law(power_law(0.3675, -0.014, 0.015));
  EXPECT_NEAR(fit.alpha, -0.014, 1e-4);
  EXPECT_NEAR(fit.beta, 0.3675, 1e-3);
  EXPECT_NEAR(fit.j_star_offset, 0.015, 1e-4);
  EXPECT_GE(fit.rho, 1 - 1e-9);
  EXPECT_EQ(fit.residuals.size(), 20u);
}

TEST(PowerLawFit, RecoversSecondFit) {
  const auto fit = fit_offset_power_law(power_law(0.9493, -0.014, 0.001));
  EXPECT_NEAR(fit.alpha, -0.014, 1e-4);
  EXPECT_NEAR(fit.beta, 0.9493, 1e-3);
  EXPECT_NEAR(fit.j_star_offset, 0.001, 1e-4);
  EXPECT_GE(fit.rho, 1 - 1e-9);
}

TEST(PowerLawFit, FixedZeroOffsetIsExact) {
  const auto fit = fit_offset_power_law(power_law(2.5, -0.3, 0.0, 0, 6), FixedOffset{0.0});
  EXPECT_NEAR(fit.alpha, -0.3, 3e-10);
  EXPECT_NEAR(fit.beta, 2.5, 2.5e-9);
  EXPECT_EQ(fit.j_star_offset, 0.0);
}

TEST(PowerLawFit, SearchStaysBelowMinimum) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 0.05);
  for (int t = 0; t < 20; ++t) {
    auto pts = power_law(1.0, -0.1, 0.2, 0, 4, 15);
    for (auto& p : pts) p.loss *= std::exp(n(rng));
    double min_loss = 1e300;
    for (const auto& p : pts) min_loss = std::min(min_loss, p.loss);
    const auto fit = fit_offset_power_law(pts);
    EXPECT_LT(fit.j_star_offset, min_loss);
    EXPECT_GE(fit.j_star_offset, 0.0);
  }
}

TEST(PowerLawFit, RhoInvariantToFlopsScale) {
  auto pts = power_law(0.5, -0.05, 0.1, 10, 14, 12);
  pts[3].loss *= 1.01;
  pts[7].loss *= 0.99;
  auto scaled = pts;
  for (auto& p : scaled) p.flops *= 1000.0;
  const auto a = fit_offset_power_law(pts, FixedOffset{0.05});
  const auto b = fit_offset_power_law(scaled, FixedOffset{0.05});
  EXPECT_NEAR(a.alpha, b.alpha, 1e-12);
  EXPECT_NEAR(a.rho, b.rho, 1e-12);
  EXPECT_GT(std::fabs(a.beta - b.beta), 1e-3);
}

TEST(PowerLawFit, Errors) {
  std::vector<CurvePoint> flat{{1, 2}, {2, 2}, {3, 2}};
  EXPECT_THROW(fit_offset_power_law(flat), DegenerateFitError);
  EXPECT_THROW(fit_offset_power_law({{1, 2}, {2, 1}}), InputError);
  EXPECT_THROW(fit_offset_power_law(power_law(1, -0.1, 0.5), FixedOffset{0.6}), OffsetError);
}

TEST(CompareCorrected, Examples) {
  const auto pure = power_law(3.0, -0.2, 0.0, 0, 5, 10);
  const auto same = compare_corrected(pure, 0.0);
  EXPECT_EQ(same.rho_corrected, same.rho_uncorrected);
  EXPECT_GE(same.rho_uncorrected, 1 - 1e-9);

  auto pts = power_law(1.0, -0.3, 0.0, 0, 6, 25);
  double min_loss = 1e300;
  for (const auto& p : pts) min_loss = std::min(min_loss, p.loss);
  const double offset = 0.3 * min_loss / 0.7;  // 30% of the offset-shifted minimum
  std::mt19937_64 rng(12);
  std::normal_distribution<double> noise(0.0, 0.01);
  for (auto& p : pts) p.loss = (p.loss + offset) * std::exp(noise(rng));
  const auto pair = compare_corrected(pts, offset);
  EXPECT_GT(pair.rho_corrected, pair.rho_uncorrected);
}
