#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "dol/core.hpp"

namespace dol {

enum class EstimatorKind { full, snis, dol, cdol };

std::string_view to_string(EstimatorKind kind) noexcept;
EstimatorKind parse_estimator_kind(std::string_view text);

/// Native interpolation coefficients at one diffusion step.
struct GridPoint {
  double alpha = 1.0;
  double sigma = 1.0;
};

struct BEstimate {
  double b_hat = 0.0;
  double std_err = 0.0;
  std::size_t repeats_used = 0;
};

struct ExecutionOptions {
  unsigned threads = 1;
};

struct EstimateReport {
  OptimalLossCurve curve;          // total units, clamped at zero
  double a_hat = 0.0;
  std::vector<double> b_hat;
  std::vector<std::size_t> repeats_used;
  std::vector<bool> clamped;       // a_hat - b_hat was negative before clamping
  EstimatorKind estimator = EstimatorKind::cdol;
  EstimatorConfig config;          // after default resolution
};

/// (1/N) sum_n ||x0_n||^2 with compensated summation.
double estimate_A(const Dataset& ds);

/// Fills unset fields: L = min(N, 5000), M = 4L (3N for the full estimator),
/// R = ceil(3N / L), C = 4N / L. The DOL estimator always resolves C = 1.
/// Throws ConfigError on values that cannot be used with `n_samples`.
EstimatorConfig resolve_config(const EstimatorConfig& config, std::size_t n_samples, EstimatorKind kind);

/// B over the whole dataset: M x_t samples built from uniformly drawn data
/// points, each scored by the squared norm of the full posterior mean.
/// Uses config.xt_samples and config.seed only; repeats_used is 1.
BEstimate estimate_B_full(const Dataset& ds, GridPoint point, const EstimatorConfig& config,
                          ExecutionOptions exec = {});

/// Self-normalised importance sampling: x_t from the full dataset, the
/// posterior mean over a fresh size-L subset (drawn with replacement) per repeat.
BEstimate estimate_B_snis(const Dataset& ds, GridPoint point, const EstimatorConfig& config,
                          ExecutionOptions exec = {});

/// Corrected DOL: x_t is built from a uniformly chosen subset position and
/// that position's kernel weight is scaled by 1/C. C = 1 is DOL; C = +inf
/// drops the self pair. From the fourth repeat on, repeats stop once
/// std_err / |b_hat| < rel_tol.
BEstimate estimate_B_cdol(const Dataset& ds, GridPoint point, const EstimatorConfig& config,
                          ExecutionOptions exec = {});

/// Dispatches on `kind` after resolving defaults. sigma = 0 returns B = A
/// without sampling.
BEstimate estimate_B(const Dataset& ds, GridPoint point, EstimatorKind kind,
                     const EstimatorConfig& config, ExecutionOptions exec = {});

/// Runs the estimator at every VE grid point. Each point draws from its own
/// Philox stream keyed by (seed, sigma), so a point's value does not depend on
/// the rest of the grid or on the thread count.
EstimateReport estimate_curve(const Dataset& ds, const NoiseGrid& grid, EstimatorKind kind,
                              const EstimatorConfig& config, ExecutionOptions exec = {});

}  // namespace dol
