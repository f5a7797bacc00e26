#include "dol/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "dol/errors.hpp"
#include "numeric.hpp"

namespace dol {

namespace {

double normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

void check_decay_floor(double decay, double floor) {
  if (!(decay >= 0.0 && decay <= 1.0)) throw ConfigError("decay must lie in [0, 1]");
  if (!(floor > 0.0) || !std::isfinite(floor)) throw ConfigError("gap floor must be positive");
}

double floored(double obs, double floor) {
  if (!std::isfinite(obs)) throw DomainError("observed gap is not finite");
  return obs > floor ? obs : floor;
}

// Cumulative trapezoid masses at each knot.
std::vector<double> cumulative(const PiecewisePdf& pdf) {
  std::vector<double> c(pdf.log_sigma.size(), 0.0);
  detail::CompensatedSum sum;
  for (std::size_t i = 1; i < c.size(); ++i) {
    const double h = pdf.log_sigma[i] - pdf.log_sigma[i - 1];
    sum.add(0.5 * h * (pdf.density[i - 1] + pdf.density[i]));
    c[i] = sum.value();
  }
  return c;
}

double cdf_at(const PiecewisePdf& pdf, const std::vector<double>& cum, double x) {
  const auto& xs = pdf.log_sigma;
  if (xs.empty() || x <= xs.front()) return 0.0;
  if (x >= xs.back()) return cum.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
  const double h = xs[i + 1] - xs[i];
  const double s = x - xs[i];
  const double p0 = pdf.density[i];
  const double p1 = pdf.density[i + 1];
  return cum[i] + p0 * s + (p1 - p0) * s * s / (2.0 * h);
}

}  // namespace

std::vector<double> isotonic_nondecreasing(const std::vector<double>& values) {
  struct Block {
    double sum;
    std::size_t count;
    double mean() const { return sum / static_cast<double>(count); }
  };
  std::vector<Block> blocks;
  blocks.reserve(values.size());
  for (double v : values) {
    blocks.push_back({v, 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean() > blocks.back().mean()) {
      const Block top = blocks.back();
      blocks.pop_back();
      blocks.back().sum += top.sum;
      blocks.back().count += top.count;
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& b : blocks) out.insert(out.end(), b.count, b.mean());
  return out;
}

JStarInterpolant::JStarInterpolant(const OptimalLossCurve& curve)
    : log_sigma_(curve.grid.log_sigmas()), j_(isotonic_nondecreasing(curve.j_star)) {
  if (j_.size() != log_sigma_.size() || j_.empty()) {
    throw AlignmentError("optimal loss curve has " + std::to_string(j_.size()) + " values for " +
                         std::to_string(log_sigma_.size()) + " grid points");
  }
  for (double& v : j_) v = std::max(v, 0.0);
}

double JStarInterpolant::operator()(double sigma_hat) const {
  if (!(sigma_hat > 0.0)) throw DomainError("sigma_hat must be positive");
  double x = std::log(sigma_hat);
  const double lo = log_sigma_.front();
  const double hi = log_sigma_.back();
  const double slack = 1e-12 * std::max({1.0, std::fabs(lo), std::fabs(hi)});
  if (x < lo - slack || x > hi + slack) {
    throw ExtrapolationError("log sigma = " + std::to_string(x) + " is outside the curve span [" +
                             std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  x = std::clamp(x, lo, hi);
  if (log_sigma_.size() == 1) return j_.front();
  const auto it = std::upper_bound(log_sigma_.begin(), log_sigma_.end(), x);
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - log_sigma_.begin()),
                                               log_sigma_.size() - 1) - 1;
  const double t = (x - log_sigma_[i]) / (log_sigma_[i + 1] - log_sigma_[i]);
  return j_[i] + t * (j_[i + 1] - j_[i]);
}

double loss_weight(const JStarInterpolant& jstar, const WeightParams& params, double sigma_hat) {
  const double j = jstar(sigma_hat);
  const double inv = j > 0.0 ? 1.0 / j : std::numeric_limits<double>::infinity();
  double w = params.a * std::min(inv, params.w_star);
  if (sigma_hat < params.sigma_star) w += normal_pdf(std::log(sigma_hat), params.mu, params.varsigma);
  return w;
}

double loss_weight(const OptimalLossCurve& curve, const WeightParams& params, double sigma_hat) {
  return loss_weight(JStarInterpolant(curve), params, sigma_hat);
}

double detect_critical_point(const OptimalLossCurve& curve, double threshold_frac) {
  if (!(threshold_frac > 0.0 && threshold_frac < 1.0)) {
    throw ConfigError("threshold fraction must lie in (0, 1)");
  }
  const JStarInterpolant clean(curve);
  const auto& j = clean.values();
  const auto& x = clean.log_sigmas();
  const double plateau = j.back();
  if (!(plateau > 0.0)) throw NoCriticalPointError("optimal loss curve is identically zero");
  const double thr = threshold_frac * plateau;
  std::size_t i = 0;
  while (j[i] < thr) ++i;
  if (i == 0) return std::exp(x[0]);
  const double t = (thr - j[i - 1]) / (j[i] - j[i - 1]);
  return std::exp(x[i - 1] + t * (x[i] - x[i - 1]));
}

WeightParams resolve_weight_params(const OptimalLossCurve& curve, const WeightOverrides& given,
                                   double threshold_frac) {
  WeightParams p;
  p.a = given.a.value_or(1.0);
  p.sigma_star = given.sigma_star ? *given.sigma_star : detect_critical_point(curve, threshold_frac);
  if (given.w_star) {
    p.w_star = *given.w_star;
  } else {
    const JStarInterpolant jstar(curve);
    const double x = std::clamp(std::log(p.sigma_star), jstar.log_sigmas().front(), jstar.log_sigmas().back());
    const double j = jstar(std::exp(x));
    if (!(j > 0.0)) throw ConfigError("optimal loss is zero at sigma_star; pass w_star explicitly");
    p.w_star = 1.0 / j;
  }
  p.mu = given.mu.value_or(std::log(p.sigma_star) - 1.0);
  p.varsigma = given.varsigma.value_or(0.5);
  if (!(p.a > 0.0) || !std::isfinite(p.a)) throw ConfigError("a must be positive");
  if (!(p.w_star > 0.0) || !std::isfinite(p.w_star)) throw ConfigError("w_star must be positive");
  if (!(p.sigma_star > 0.0) || !std::isfinite(p.sigma_star)) throw ConfigError("sigma_star must be positive");
  if (!(p.varsigma > 0.0) || !std::isfinite(p.varsigma)) throw ConfigError("varsigma must be positive");
  if (!std::isfinite(p.mu)) throw ConfigError("mu must be finite");
  return p;
}

GapBins initial_gap_bins(const NoiseGrid& grid, const std::vector<double>& observed, double decay,
                         double floor) {
  check_decay_floor(decay, floor);
  if (observed.size() != grid.size()) {
    throw AlignmentError("got " + std::to_string(observed.size()) + " gaps for " +
                         std::to_string(grid.size()) + " bins");
  }
  GapBins bins{grid, {}, decay, floor};
  bins.gaps.reserve(observed.size());
  for (double o : observed) bins.gaps.push_back(floored(o, floor));
  return bins;
}

GapBins update_gap_bins(const GapBins& bins, const std::vector<double>& observed) {
  check_decay_floor(bins.decay, bins.floor);
  if (observed.size() != bins.gaps.size() || bins.gaps.size() != bins.grid.size()) {
    throw AlignmentError("got " + std::to_string(observed.size()) + " observations for " +
                         std::to_string(bins.gaps.size()) + " bins");
  }
  GapBins out = bins;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    out.gaps[i] = bins.decay * bins.gaps[i] + (1.0 - bins.decay) * floored(observed[i], bins.floor);
  }
  return out;
}

double PiecewisePdf::integral() const {
  if (log_sigma.size() < 2) return 0.0;
  return cumulative(*this).back();
}

double PiecewisePdf::operator()(double x) const {
  if (log_sigma.size() < 2 || x < log_sigma.front() || x > log_sigma.back()) return 0.0;
  const auto it = std::upper_bound(log_sigma.begin(), log_sigma.end(), x);
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - log_sigma.begin()),
                                               log_sigma.size() - 1) - 1;
  const double t = (x - log_sigma[i]) / (log_sigma[i + 1] - log_sigma[i]);
  return density[i] + t * (density[i + 1] - density[i]);
}

double PiecewisePdf::mass(double lo, double hi) const {
  if (log_sigma.size() < 2 || !(hi > lo)) return 0.0;
  const auto cum = cumulative(*this);
  return cdf_at(*this, cum, hi) - cdf_at(*this, cum, lo);
}

PiecewisePdf adaptive_pdf(const GapBins& bins) {
  if (bins.grid.size() < 2) throw ConfigError("adaptive pdf needs at least two bins");
  if (bins.gaps.size() != bins.grid.size()) throw AlignmentError("gap bins do not match their grid");
  PiecewisePdf pdf;
  pdf.log_sigma = bins.grid.log_sigmas();
  pdf.density.resize(bins.gaps.size());
  bool all_floor = true;
  for (std::size_t i = 0; i < bins.gaps.size(); ++i) {
    pdf.density[i] = floored(bins.gaps[i], bins.floor);
    if (pdf.density[i] > bins.floor) all_floor = false;
  }
  if (all_floor) {
    std::fill(pdf.density.begin(), pdf.density.end(), 1.0);
    pdf.uniform_fallback = true;
  }
  const double z = pdf.integral();
  for (double& v : pdf.density) v /= z;
  return pdf;
}

double sample_log_sigma(const PiecewisePdf& pdf, double u) {
  if (!(u >= 0.0 && u < 1.0)) throw DomainError("u must lie in [0, 1), got " + std::to_string(u));
  const auto& xs = pdf.log_sigma;
  if (xs.size() < 2 || pdf.density.size() != xs.size()) throw ConfigError("pdf needs at least two knots");
  const auto cum = cumulative(pdf);
  const double target = u * cum.back();
  std::size_t i = 0;
  // First segment whose upper cumulative mass exceeds the target; zero-mass
  // segments are skipped.
  while (i + 1 < xs.size() - 1 && !(cum[i + 1] > target)) ++i;
  const double h = xs[i + 1] - xs[i];
  const double p0 = pdf.density[i];
  const double p1 = pdf.density[i + 1];
  const double r = std::max(target - cum[i], 0.0);
  // p0 s + (p1 - p0) s^2 / (2h) = r, in the form without cancellation.
  const double disc = std::max(p0 * p0 + 2.0 * (p1 - p0) * r / h, 0.0);
  const double denom = p0 + std::sqrt(disc);
  const double s = denom > 0.0 ? 2.0 * r / denom : 0.0;
  return xs[i] + std::clamp(s, 0.0, h);
}

double sample_sigma(const PiecewisePdf& pdf, double u) { return std::exp(sample_log_sigma(pdf, u)); }

}  // namespace dol
