#include "dol/core.hpp"

#include <cmath>
#include <string>

#include "numeric.hpp"

namespace dol {

std::string_view to_string(UnitConvention unit) noexcept {
  return unit == UnitConvention::total ? "total" : "per-dim";
}

UnitConvention parse_unit(std::string_view text) {
  if (text == "total") return UnitConvention::total;
  if (text == "per-dim" || text == "per_dim") return UnitConvention::per_dim;
  throw ConfigError("unknown unit convention '" + std::string(text) + "'");
}

Dataset::Dataset(std::size_t n_samples, std::size_t dim, std::vector<float> values)
    : n_(n_samples), d_(dim), values_(std::move(values)) {
  if (n_ == 0 || d_ == 0) {
    throw SpecError("dataset needs at least one sample and one dimension");
  }
  if (values_.size() != n_ * d_) {
    throw SpecError("dataset shape " + std::to_string(n_) + "x" + std::to_string(d_) +
                    " does not match " + std::to_string(values_.size()) + " values");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw DataError(i / d_, "non-finite value in row " + std::to_string(i / d_));
    }
  }
}

double data_variance(const Dataset& ds, UnitConvention unit) {
  const std::size_t n = ds.size();
  const std::size_t d = ds.dim();
  std::vector<double> mean(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    detail::CompensatedSum s;
    for (std::size_t i = 0; i < n; ++i) s.add(ds.row(i)[j]);
    mean[j] = s.value() / static_cast<double>(n);
  }
  detail::CompensatedSum total;
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = ds.row(i);
    double sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double r = static_cast<double>(x[j]) - mean[j];
      sq += r * r;
    }
    total.add(sq);
  }
  const double var = total.value() / static_cast<double>(n);
  return unit == UnitConvention::total ? var : var / static_cast<double>(d);
}

NoiseGrid::NoiseGrid(std::vector<double> log_sigmas) : log_sigmas_(std::move(log_sigmas)) {
  if (log_sigmas_.empty()) throw SpecError("noise grid is empty");
  for (std::size_t i = 0; i < log_sigmas_.size(); ++i) {
    if (!std::isfinite(log_sigmas_[i])) throw SpecError("noise grid has a non-finite point");
    if (i > 0 && !(log_sigmas_[i] > log_sigmas_[i - 1])) {
      throw SpecError("noise grid must be strictly increasing");
    }
  }
}

NoiseGrid NoiseGrid::linspace(double log_min, double log_max, std::size_t steps) {
  if (steps == 0) throw SpecError("noise grid needs at least one step");
  if (steps == 1) return NoiseGrid({log_min});
  std::vector<double> pts(steps);
  const double h = (log_max - log_min) / static_cast<double>(steps - 1);
  for (std::size_t i = 0; i < steps; ++i) pts[i] = log_min + h * static_cast<double>(i);
  pts.back() = log_max;
  return NoiseGrid(std::move(pts));
}

double NoiseGrid::sigma(std::size_t i) const { return std::exp(log_sigmas_.at(i)); }

std::string_view to_string(ProcessKind kind) noexcept {
  switch (kind) {
    case ProcessKind::VE: return "VE";
    case ProcessKind::VP: return "VP";
    case ProcessKind::FM: return "FM";
  }
  return "?";
}

bool DiffusionProcess::in_domain(double sigma) const noexcept {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) return false;
  return kind_ == ProcessKind::VE || sigma < 1.0;
}

double DiffusionProcess::domain_upper() const noexcept {
  return kind_ == ProcessKind::VE ? std::numeric_limits<double>::infinity() : 1.0;
}

void DiffusionProcess::require_domain(double sigma) const {
  if (!in_domain(sigma)) {
    throw DomainError(std::string(to_string(kind_)) + " process is undefined at sigma = " +
                      std::to_string(sigma));
  }
}

double DiffusionProcess::alpha(double sigma) const {
  require_domain(sigma);
  switch (kind_) {
    case ProcessKind::VE: return 1.0;
    case ProcessKind::VP: return std::sqrt((1.0 - sigma) * (1.0 + sigma));
    case ProcessKind::FM: return 1.0 - sigma;
  }
  return 1.0;
}

double DiffusionProcess::drift(double sigma) const {
  require_domain(sigma);
  switch (kind_) {
    case ProcessKind::VE: return 0.0;
    case ProcessKind::VP: return -sigma / ((1.0 - sigma) * (1.0 + sigma));
    case ProcessKind::FM: return -1.0 / (1.0 - sigma);
  }
  return 0.0;
}

double DiffusionProcess::diffusion_sq(double sigma) const {
  require_domain(sigma);
  switch (kind_) {
    case ProcessKind::VE: return 2.0 * sigma;
    case ProcessKind::VP: return 2.0 * sigma / ((1.0 - sigma) * (1.0 + sigma));
    case ProcessKind::FM: return 2.0 * sigma / (1.0 - sigma);
  }
  return 0.0;
}

DriftDiffusion numeric_drift_diffusion(const std::function<double(double)>& alpha_of_sigma,
                                       double sigma) {
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  // d/dsigma f = (1/sigma) d/d(log sigma) f
  const double h = 1e-6;
  const double lo = sigma * std::exp(-h);
  const double hi = sigma * std::exp(h);
  const double dlog_alpha = (std::log(alpha_of_sigma(hi)) - std::log(alpha_of_sigma(lo))) / (2 * h);
  const auto log_snr_inv = [&](double s) {
    const double a = alpha_of_sigma(s);
    return std::log(s * s / (a * a));
  };
  const double dlog_ratio = (log_snr_inv(hi) - log_snr_inv(lo)) / (2 * h);
  return {dlog_alpha / sigma, sigma * sigma * dlog_ratio / sigma};
}

OptimalLossCurve OptimalLossCurve::in_unit(UnitConvention target, std::size_t dim) const {
  if (dim == 0) throw SpecError("dimension must be positive");
  OptimalLossCurve out = *this;
  if (target == unit) return out;
  const double d = static_cast<double>(dim);
  const bool to_per_dim = target == UnitConvention::per_dim;
  for (auto* column : {&out.j_star, &out.std_err}) {
    for (auto& v : *column) v = to_per_dim ? v / d : v * d;
  }
  out.unit = target;
  return out;
}

}  // namespace dol
