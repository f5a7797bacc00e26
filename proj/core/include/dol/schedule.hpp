#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "dol/core.hpp"

namespace dol {

struct WeightParams {
  double a = 1.0;           // scale on the inverse optimal loss
  double w_star = 0.0;      // cutoff on 1 / J*
  double sigma_star = 0.0;  // bump is active below this VE level
  double mu = 0.0;          // bump centre in log sigma
  double varsigma = 1.0;    // bump width in log sigma
};

/// Pool-adjacent-violators projection of j_star onto nondecreasing sequences
/// (equal weights).
std::vector<double> isotonic_nondecreasing(const std::vector<double>& values);

/// Monotone-cleaned optimal loss, linear in log sigma between grid points.
class JStarInterpolant {
 public:
  explicit JStarInterpolant(const OptimalLossCurve& curve);

  /// Throws ExtrapolationError outside [sigma_min, sigma_max] of the grid.
  double operator()(double sigma_hat) const;

  const std::vector<double>& log_sigmas() const noexcept { return log_sigma_; }
  const std::vector<double>& values() const noexcept { return j_; }

 private:
  std::vector<double> log_sigma_;
  std::vector<double> j_;
};

/// a * min(1 / J*, w_star) + N(log sigma; mu, varsigma^2) [sigma < sigma_star].
/// A zero J* makes the cutoff bind. Throws ExtrapolationError outside the grid.
double loss_weight(const JStarInterpolant& jstar, const WeightParams& params, double sigma_hat);
double loss_weight(const OptimalLossCurve& curve, const WeightParams& params, double sigma_hat);

/// Smallest sigma where the cleaned curve reaches threshold_frac times its
/// maximum, interpolated linearly in log sigma between the straddling points.
/// Throws NoCriticalPointError for an all-zero curve and ConfigError for a
/// threshold outside (0, 1).
double detect_critical_point(const OptimalLossCurve& curve, double threshold_frac = 0.01);

struct WeightOverrides {
  std::optional<double> a;
  std::optional<double> w_star;
  std::optional<double> sigma_star;
  std::optional<double> mu;
  std::optional<double> varsigma;
};

/// Fills what `given` leaves open: a = 1, sigma_star from
/// detect_critical_point, w_star = 1 / J*(sigma_star), mu = log sigma_star - 1,
/// varsigma = 0.5. Throws ConfigError for non-positive a, w_star, sigma_star
/// or varsigma.
WeightParams resolve_weight_params(const OptimalLossCurve& curve, const WeightOverrides& given,
                                   double threshold_frac = 0.01);

/// EMA of weighted loss gaps per log-sigma bin.
struct GapBins {
  NoiseGrid grid;
  std::vector<double> gaps;
  double decay = 0.9;
  double floor = 1e-6;
};

/// Bins seeded with the first (floored) observation.
GapBins initial_gap_bins(const NoiseGrid& grid, const std::vector<double>& observed, double decay,
                         double floor);

/// new = decay * old + (1 - decay) * max(observed, floor). Throws
/// AlignmentError when `observed` does not match the bins.
GapBins update_gap_bins(const GapBins& bins, const std::vector<double>& observed);

/// Piecewise-linear density over log sigma, zero outside the knots.
struct PiecewisePdf {
  std::vector<double> log_sigma;
  std::vector<double> density;
  bool uniform_fallback = false;  // every gap sat at the floor

  /// Trapezoid integral over the support.
  double integral() const;
  double operator()(double log_sigma) const;
  /// Probability mass in [lo, hi] (log sigma).
  double mass(double lo, double hi) const;
};

/// Density through (log sigma_i, gap_i), normalised to unit mass. Throws
/// ConfigError for fewer than two bins.
PiecewisePdf adaptive_pdf(const GapBins& bins);

/// Inverse CDF in log sigma; u = 0 gives the left edge. Throws DomainError
/// for u outside [0, 1).
double sample_log_sigma(const PiecewisePdf& pdf, double u);
double sample_sigma(const PiecewisePdf& pdf, double u);

}  // namespace dol
