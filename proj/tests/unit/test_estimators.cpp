#include <gtest/gtest.h>

#include <cmath>

#include "dol/estimators.hpp"
#include "dol/ingest.hpp"
#include "test_support.hpp"

using namespace dol;

namespace {

// J* of the two-point distribution {-1, +1} at alpha = 1, sigma = 1:
// E[1 - tanh^2(x_t)], x_t = 1 + eps, by adaptive quadrature at 30 digits.
constexpr double kTwoPointJStarSigma1 = 0.44959950920667282971;

EstimatorConfig seeded(std::uint64_t seed) {
  EstimatorConfig c;
  c.seed = seed;
  return c;
}

}  // namespace

TEST(EstimateA, Examples) {
  EXPECT_EQ(estimate_A(test::dataset_from(2, {1, 0, 0, 1})), 1.0);
  EXPECT_EQ(estimate_A(test::dataset_from(3, {0, 0, 0})), 0.0);
  const auto g = test::gaussian_dataset(10000, 8, 1.0, 21);
  EXPECT_NEAR(estimate_A(g), 8.0, 0.15);
}

TEST(ResolveConfig, Defaults) {
  const auto c = resolve_config({}, 2000, EstimatorKind::cdol);
  EXPECT_EQ(c.subset_size, 2000u);
  EXPECT_EQ(c.xt_samples, 8000u);
  EXPECT_EQ(c.max_repeats, 3u);
  EXPECT_DOUBLE_EQ(*c.correction, 4.0);

  EstimatorConfig l500;
  l500.subset_size = 500;
  const auto d = resolve_config(l500, 2000, EstimatorKind::cdol);
  EXPECT_EQ(d.xt_samples, 2000u);
  EXPECT_EQ(d.max_repeats, 12u);
  EXPECT_DOUBLE_EQ(*d.correction, 16.0);

  EXPECT_EQ(resolve_config({}, 9000, EstimatorKind::snis).subset_size, 5000u);
  const auto f = resolve_config(l500, 2000, EstimatorKind::full);
  EXPECT_EQ(f.subset_size, 2000u);
  EXPECT_EQ(f.xt_samples, 6000u);
  EXPECT_EQ(f.max_repeats, 1u);

  EstimatorConfig c3;
  c3.correction = 3.0;
  EXPECT_DOUBLE_EQ(*resolve_config(c3, 100, EstimatorKind::dol).correction, 1.0);
}

TEST(ResolveConfig, Rejections) {
  EstimatorConfig big;
  big.subset_size = 11;
  EXPECT_THROW(resolve_config(big, 10, EstimatorKind::cdol), ConfigError);
  EstimatorConfig small_c;
  small_c.correction = 0.5;
  EXPECT_THROW(resolve_config(small_c, 10, EstimatorKind::cdol), ConfigError);
  EstimatorConfig inf_one;
  inf_one.subset_size = 1;
  inf_one.correction = EstimatorConfig::infinite_correction;
  EXPECT_THROW(resolve_config(inf_one, 10, EstimatorKind::cdol), ConfigError);
  EstimatorConfig neg_tol;
  neg_tol.rel_tol = -1;
  EXPECT_THROW(resolve_config(neg_tol, 10, EstimatorKind::cdol), ConfigError);
}

TEST(Estimators, SinglePointDatasetHasZeroOptimalLoss) {
  const auto ds = test::dataset_from(3, {0.25, -1.5, 2.0});
  const auto grid = NoiseGrid::linspace(-4, 4, 9);
  for (auto kind : {EstimatorKind::full, EstimatorKind::snis, EstimatorKind::dol, EstimatorKind::cdol}) {
    const auto r = estimate_curve(ds, grid, kind, seeded(1));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      EXPECT_EQ(r.curve.j_star[i], 0.0) << to_string(kind) << " at " << grid.log_sigma(i);
      EXPECT_EQ(r.b_hat[i], r.a_hat);
    }
  }
  const auto full = estimate_B_full(ds, {1.0, 0.5}, seeded(2));
  EXPECT_EQ(full.b_hat, estimate_A(ds));
  EXPECT_EQ(full.std_err, 0.0);
}

TEST(Estimators, FullMatchesTwoPointQuadrature) {
  const auto ds = test::dataset_from(1, {-1, 1});
  EstimatorConfig cfg = seeded(3);
  cfg.xt_samples = 40000;
  const auto b = estimate_B_full(ds, {1.0, 1.0}, cfg);
  const double j = estimate_A(ds) - b.b_hat;
  EXPECT_NEAR(j, kTwoPointJStarSigma1, 3 * b.std_err);
  EXPECT_LT(b.std_err, 0.01);
}

TEST(Estimators, HugeSigmaApproachesDataVariance) {
  const auto ds = test::dataset_from(1, {-1, 1});
  const auto b = estimate_B_full(ds, {1.0, 1e6}, seeded(4));
  EXPECT_NEAR(b.b_hat, 0.0, 1e-9);
  EXPECT_NEAR(estimate_A(ds) - b.b_hat, 1.0, 1e-9);
}

TEST(Estimators, SigmaZeroIsExactlyZeroLoss) {
  const auto ds = test::gaussian_dataset(20, 2, 1.0, 5);
  const auto b = estimate_B(ds, {1.0, 0.0}, EstimatorKind::cdol, seeded(1));
  EXPECT_EQ(b.b_hat, estimate_A(ds));
}

TEST(Estimators, RejectsBadSigma) {
  const auto ds = test::gaussian_dataset(20, 2, 1.0, 5);
  EXPECT_THROW(estimate_B_cdol(ds, {1.0, -1.0}, seeded(1)), DomainError);
  EXPECT_THROW(estimate_B_snis(ds, {0.0, 1.0}, seeded(1)), DomainError);
}

TEST(Estimators, CorrectionOneIsDol) {
  const auto ds = test::gaussian_dataset(60, 3, 1.0, 8);
  const auto grid = NoiseGrid::linspace(-2, 2, 5);
  EstimatorConfig cdol = seeded(9);
  cdol.correction = 1.0;
  const auto a = estimate_curve(ds, grid, EstimatorKind::cdol, cdol);
  const auto b = estimate_curve(ds, grid, EstimatorKind::dol, seeded(9));
  EXPECT_EQ(a.curve.j_star, b.curve.j_star);
  EXPECT_EQ(a.curve.std_err, b.curve.std_err);
  EXPECT_EQ(a.repeats_used, b.repeats_used);
}

TEST(Estimators, ThreadCountDoesNotChangeResults) {
  const auto ds = test::gaussian_dataset(300, 4, 1.0, 10);
  for (auto kind : {EstimatorKind::full, EstimatorKind::snis, EstimatorKind::cdol}) {
    EstimatorConfig cfg = seeded(11);
    cfg.subset_size = 100;
    const auto one = estimate_curve(ds, NoiseGrid::linspace(-1, 1, 3), kind, cfg, {1});
    const auto many = estimate_curve(ds, NoiseGrid::linspace(-1, 1, 3), kind, cfg, {8});
    EXPECT_EQ(one.curve.j_star, many.curve.j_star) << to_string(kind);
    EXPECT_EQ(one.curve.std_err, many.curve.std_err) << to_string(kind);
    // Single grid point: threads go to the inner loop instead.
    const auto p1 = estimate_curve(ds, NoiseGrid({0.1}), kind, cfg, {1});
    const auto p8 = estimate_curve(ds, NoiseGrid({0.1}), kind, cfg, {8});
    EXPECT_EQ(p1.curve.j_star, p8.curve.j_star) << to_string(kind);
  }
}

TEST(Estimators, PointValueIndependentOfGrid) {
  const auto ds = test::gaussian_dataset(80, 2, 1.0, 12);
  const NoiseGrid wide({-1.0, 0.0, 0.5});
  const NoiseGrid alone({0.0});
  const auto a = estimate_curve(ds, wide, EstimatorKind::cdol, seeded(13));
  const auto b = estimate_curve(ds, alone, EstimatorKind::cdol, seeded(13));
  EXPECT_EQ(a.curve.j_star[1], b.curve.j_star[0]);
  const auto c = estimate_curve(ds, alone, EstimatorKind::cdol, seeded(14));
  EXPECT_NE(a.curve.j_star[1], c.curve.j_star[0]);
}

TEST(Estimators, StaysWithinBounds) {
  for (unsigned s = 0; s < 10; ++s) {
    const auto ds = test::gaussian_dataset(10 + 5 * s, 1 + s % 3, 0.5 + s, 100 + s);
    const auto grid = NoiseGrid::linspace(-5, 8, 7);
    for (auto kind : {EstimatorKind::full, EstimatorKind::snis, EstimatorKind::dol, EstimatorKind::cdol}) {
      const auto r = estimate_curve(ds, grid, kind, seeded(s));
      for (std::size_t i = 0; i < grid.size(); ++i) {
        EXPECT_GE(r.curve.j_star[i], 0.0);
        EXPECT_LE(r.curve.j_star[i], r.a_hat);
        EXPECT_LE(r.repeats_used[i], r.config.max_repeats);
        EXPECT_EQ(r.clamped[i], r.a_hat - r.b_hat[i] < 0.0);
      }
    }
  }
}

TEST(Estimators, EarlyStopNeedsFourRepeats) {
  const auto ds = test::gaussian_dataset(50, 2, 1.0, 15);
  EstimatorConfig cfg = seeded(1);
  cfg.subset_size = 10;
  cfg.max_repeats = 200;
  cfg.rel_tol = 0.5;
  const auto b = estimate_B_cdol(ds, {1.0, 1.0}, cfg);
  EXPECT_EQ(b.repeats_used, 4u);
  cfg.rel_tol = 0.0;
  EXPECT_EQ(estimate_B_cdol(ds, {1.0, 1.0}, cfg).repeats_used, 200u);
}

TEST(Estimators, SnisWithFullSubsetAgreesWithFull) {
  const auto ds = test::gaussian_dataset(40, 2, 1.0, 16);
  EstimatorConfig cfg = seeded(17);
  cfg.subset_size = 40;
  cfg.xt_samples = 400;
  cfg.max_repeats = 400;
  cfg.rel_tol = 0.0;
  const auto snis = estimate_B_snis(ds, {1.0, 0.8}, cfg);
  EstimatorConfig fcfg = seeded(18);
  fcfg.xt_samples = 100000;
  const auto full = estimate_B_full(ds, {1.0, 0.8}, fcfg);
  // With-replacement subsets of size N carry an O(1/N) bias; compare with
  // the bias allowance on top of the statistical error.
  EXPECT_NEAR(snis.b_hat, full.b_hat, 3 * std::hypot(snis.std_err, full.std_err) + 0.03 * full.b_hat);
}

TEST(Estimators, GaussianCurveIsMonotoneWithinNoise) {
  const auto ds = generate({IsotropicGaussian{{}, 1.0}, 2000, 8, 1});
  EstimatorConfig cfg = seeded(3);
  cfg.subset_size = 500;
  const auto r = estimate_curve(ds, NoiseGrid::linspace(-3, 2.3, 16), EstimatorKind::cdol, cfg, {4});
  for (std::size_t i = 1; i < r.curve.j_star.size(); ++i) {
    const double slack = 3 * std::hypot(r.curve.std_err[i], r.curve.std_err[i - 1]);
    EXPECT_GE(r.curve.j_star[i], r.curve.j_star[i - 1] - slack) << "grid index " << i;
  }
}

TEST(Estimators, SmallSigmaPlateauOnSeparatedData) {
  // Unit-norm points: ||E[x0|xt]||^2 = 1 exactly once the posterior collapses,
  // so A - B isolates the numerics from sampling noise in ||x0||^2.
  auto g = test::gaussian_dataset(200, 3, 1.0, 19);
  std::vector<float> v(g.values().begin(), g.values().end());
  for (std::size_t i = 0; i < 200; ++i) {
    double n = 0;
    for (int j = 0; j < 3; ++j) n += double(v[i * 3 + j]) * v[i * 3 + j];
    for (int j = 0; j < 3; ++j) v[i * 3 + j] = static_cast<float>(v[i * 3 + j] / std::sqrt(n));
  }
  const Dataset ds(200, 3, v);
  const auto r = estimate_curve(ds, NoiseGrid({std::log(1e-4), std::log(1e-3)}), EstimatorKind::cdol, seeded(20));
  for (double j : r.curve.j_star) EXPECT_LT(j, 1e-3 * r.a_hat);
}

TEST(EstimatorKind, Names) {
  EXPECT_EQ(parse_estimator_kind("cdol"), EstimatorKind::cdol);
  EXPECT_EQ(to_string(EstimatorKind::snis), "snis");
  EXPECT_THROW(parse_estimator_kind("knn"), ConfigError);
}
