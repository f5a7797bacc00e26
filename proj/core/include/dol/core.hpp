#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dol/errors.hpp"

namespace dol {

enum class UnitConvention { total, per_dim };

std::string_view to_string(UnitConvention unit) noexcept;
UnitConvention parse_unit(std::string_view text);

/// The empirical data distribution: N flattened samples of dimension d.
///
/// Values are held as binary32, the precision of the on-disk format, so a
/// dataset survives a save/load cycle bit-exactly. All arithmetic on the
/// values is carried out in double.
class Dataset {
 public:
  /// Throws DataError (with the row index) on any non-finite entry and
  /// SpecError when the shape is empty or does not match `values.size()`.
  Dataset(std::size_t n_samples, std::size_t dim, std::vector<float> values);

  std::size_t size() const noexcept { return n_; }
  std::size_t dim() const noexcept { return d_; }

  std::span<const float> row(std::size_t i) const noexcept {
    return {values_.data() + i * d_, d_};
  }
  std::span<const float> values() const noexcept { return values_; }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t n_;
  std::size_t d_;
  std::vector<float> values_;
};

/// E||x0 - mean(x0)||^2 over the dataset (population normalisation).
double data_variance(const Dataset& ds, UnitConvention unit = UnitConvention::total);

/// Strictly increasing natural-log noise levels in VE coordinates.
class NoiseGrid {
 public:
  explicit NoiseGrid(std::vector<double> log_sigmas);

  /// `steps` evenly spaced points on [log_min, log_max] (both ends included).
  static NoiseGrid linspace(double log_min, double log_max, std::size_t steps);

  std::size_t size() const noexcept { return log_sigmas_.size(); }
  double log_sigma(std::size_t i) const noexcept { return log_sigmas_[i]; }
  double sigma(std::size_t i) const;
  const std::vector<double>& log_sigmas() const noexcept { return log_sigmas_; }

  friend bool operator==(const NoiseGrid&, const NoiseGrid&) = default;

 private:
  std::vector<double> log_sigmas_;
};

enum class ProcessKind { VE, VP, FM };

std::string_view to_string(ProcessKind kind) noexcept;

/// x_t = alpha_sigma * x0 + sigma * eps for the three named interpolations.
///
/// The noise level itself is used as the time variable, so `drift` is
/// d(log alpha)/d(sigma) and `diffusion_sq` is sigma^2 d(log(sigma^2/alpha^2))/d(sigma).
class DiffusionProcess {
 public:
  explicit DiffusionProcess(ProcessKind kind) noexcept : kind_(kind) {}

  ProcessKind kind() const noexcept { return kind_; }

  bool in_domain(double sigma) const noexcept;
  /// Open interval of valid native noise levels: (0, inf) for VE, (0, 1) otherwise.
  double domain_upper() const noexcept;

  /// Throws DomainError outside the native domain.
  double alpha(double sigma) const;
  double drift(double sigma) const;
  double diffusion_sq(double sigma) const;

 private:
  void require_domain(double sigma) const;

  ProcessKind kind_;
};

struct DriftDiffusion {
  double drift;
  double diffusion_sq;
};

/// Central differences in log-sigma with relative step 1e-6, for interpolations
/// without a closed form.
DriftDiffusion numeric_drift_diffusion(const std::function<double(double)>& alpha_of_sigma,
                                       double sigma);

/// Estimator parameters. Zero / unset fields are resolved against the dataset
/// by the estimators (see `resolve_config`).
struct EstimatorConfig {
  std::size_t subset_size = 0;      // L
  std::size_t xt_samples = 0;       // M, per repeat
  std::size_t max_repeats = 0;      // R
  std::optional<double> correction; // C >= 1; +inf drops the self pair
  std::uint64_t seed = 0;
  double rel_tol = 1e-3;            // 0 disables early stopping

  static constexpr double infinite_correction = std::numeric_limits<double>::infinity();
};

/// Per-grid-point optimal loss of x0 prediction in VE coordinates.
struct OptimalLossCurve {
  NoiseGrid grid;
  std::vector<double> j_star;
  std::vector<double> std_err;
  UnitConvention unit = UnitConvention::total;

  /// Re-expresses the curve in `unit`; `dim` is the data dimension.
  OptimalLossCurve in_unit(UnitConvention target, std::size_t dim) const;
};

}  // namespace dol
