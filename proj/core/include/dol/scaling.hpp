#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace dol {

struct CurvePoint {
  double flops;
  double loss;
};

/// Loss against training compute for one model size.
struct TrainingCurve {
  std::string label;
  std::vector<CurvePoint> points;  // flops strictly increasing

  /// Throws InputError unless every point is positive and flops increase.
  void validate() const;
};

/// Pointwise minimum loss over all curves: points merged by flops, running
/// minimum of the loss, one point per distinct flops value. The result does
/// not depend on the order of `curves`. Throws InputError on empty input.
std::vector<CurvePoint> envelope(const std::vector<TrainingCurve>& curves);

struct FixedOffset {
  double value;
};
struct SearchOffset {};
using OffsetMode = std::variant<SearchOffset, FixedOffset>;

/// J(F) = beta F^alpha + j_star_offset.
struct PowerLawFit {
  double alpha = 0.0;
  double beta = 0.0;
  double j_star_offset = 0.0;
  double rho = 0.0;                 // |Pearson r| of log(J - J*) vs log F
  std::vector<double> residuals;    // log(J - J*) minus the fitted line
};

/// Least squares of log(J - J*) on log F. In search mode J* maximises rho over
/// [0, (1 - 1e-6) min J] by golden-section search, with a 1024-point scan
/// when both interior probes of the first bracket fall below the end points.
///
/// Throws InputError for fewer than 3 points, DegenerateFitError when every
/// loss is equal and OffsetError when some J - J* <= 0.
PowerLawFit fit_offset_power_law(const std::vector<CurvePoint>& env, OffsetMode mode = SearchOffset{});

/// |Pearson r| of log J and of log(J - j_star) against log F.
struct CorrelationPair {
  double rho_uncorrected;
  double rho_corrected;
};
CorrelationPair compare_corrected(const std::vector<CurvePoint>& env, double j_star);

}  // namespace dol
