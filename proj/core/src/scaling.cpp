#include "dol/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dol/errors.hpp"

namespace dol {

namespace {

struct LineFit {
  double slope;
  double intercept;
  double rho;
  double unexplained;  // SSR / SST = 1 - r^2, computed from residuals
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(syy > 0.0)) throw DegenerateFitError("log loss is constant; the power law is undetermined");
  const double slope = sxy / sxx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = (y[i] - my) - slope * (x[i] - mx);
    ssr += r * r;
  }
  const double rho = std::min(1.0, std::fabs(sxy) / std::sqrt(sxx * syy));
  return {slope, my - slope * mx, rho, ssr / syy};
}

void check_env(const std::vector<CurvePoint>& env) {
  if (env.size() < 3) {
    throw InputError("power-law fit needs at least 3 envelope points, got " + std::to_string(env.size()));
  }
  for (std::size_t i = 0; i < env.size(); ++i) {
    if (!(env[i].flops > 0.0) || !(env[i].loss > 0.0) || !std::isfinite(env[i].flops) ||
        !std::isfinite(env[i].loss)) {
      throw InputError("envelope point " + std::to_string(i) + " is not positive and finite");
    }
    if (i > 0 && !(env[i].flops > env[i - 1].flops)) throw InputError("envelope flops must increase");
  }
  const bool constant = std::all_of(env.begin(), env.end(),
                                    [&](const CurvePoint& p) { return p.loss == env.front().loss; });
  if (constant) throw DegenerateFitError("every envelope loss is equal");
}

std::vector<double> log_flops(const std::vector<CurvePoint>& env) {
  std::vector<double> x(env.size());
  for (std::size_t i = 0; i < env.size(); ++i) x[i] = std::log(env[i].flops);
  return x;
}

std::vector<double> log_gap(const std::vector<CurvePoint>& env, double j_star) {
  std::vector<double> y(env.size());
  for (std::size_t i = 0; i < env.size(); ++i) {
    const double g = env[i].loss - j_star;
    if (!(g > 0.0)) {
      throw OffsetError("offset " + std::to_string(j_star) + " is not below loss " +
                        std::to_string(env[i].loss) + " at point " + std::to_string(i));
    }
    y[i] = std::log(g);
  }
  return y;
}

PowerLawFit finish(const std::vector<CurvePoint>& env, const std::vector<double>& x, double j_star) {
  const auto y = log_gap(env, j_star);
  const LineFit line = fit_line(x, y);
  PowerLawFit fit;
  fit.alpha = line.slope;
  fit.beta = std::exp(line.intercept);
  fit.j_star_offset = j_star;
  fit.rho = line.rho;
  fit.residuals.resize(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) fit.residuals[i] = y[i] - (line.intercept + line.slope * x[i]);
  return fit;
}

// Golden-section minimisation of f on [a, b].
template <typename F>
double golden_min(F&& f, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

}  // namespace

void TrainingCurve::validate() const {
  if (points.empty()) throw InputError("curve '" + label + "' has no points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (!(p.flops > 0.0) || !(p.loss > 0.0) || !std::isfinite(p.flops) || !std::isfinite(p.loss)) {
      throw InputError("curve '" + label + "' point " + std::to_string(i) + " must have positive flops and loss");
    }
    if (i > 0 && !(p.flops > points[i - 1].flops)) {
      throw InputError("curve '" + label + "' flops must be strictly increasing");
    }
  }
}

std::vector<CurvePoint> envelope(const std::vector<TrainingCurve>& curves) {
  if (curves.empty()) throw InputError("envelope needs at least one curve");
  std::vector<CurvePoint> all;
  for (const auto& c : curves) {
    c.validate();
    all.insert(all.end(), c.points.begin(), c.points.end());
  }
  std::sort(all.begin(), all.end(), [](const CurvePoint& a, const CurvePoint& b) {
    return a.flops < b.flops || (a.flops == b.flops && a.loss < b.loss);
  });
  std::vector<CurvePoint> out;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : all) {
    if (!out.empty() && out.back().flops == p.flops) continue;
    best = std::min(best, p.loss);
    out.push_back({p.flops, best});
  }
  return out;
}

PowerLawFit fit_offset_power_law(const std::vector<CurvePoint>& env, OffsetMode mode) {
  check_env(env);
  const auto x = log_flops(env);
  if (const auto* fixed = std::get_if<FixedOffset>(&mode)) return finish(env, x, fixed->value);

  double min_j = env.front().loss;
  for (const auto& p : env) min_j = std::min(min_j, p.loss);
  const double hi = (1.0 - 1e-6) * min_j;
  const auto cost = [&](double j) { return fit_line(x, log_gap(env, j)).unexplained; };
  constexpr double kTol = 1e-8;

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  const double c = hi - inv_phi * hi;
  const double d = inv_phi * hi;
  const double f0 = cost(0.0), f1 = cost(hi);
  const double fc = cost(c), fd = cost(d);
  double best;
  if (fc > std::max(f0, f1) && fd > std::max(f0, f1)) {
    constexpr int kScan = 1024;
    int arg = 0;
    double fbest = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= kScan; ++k) {
      const double f = cost(hi * k / kScan);
      if (f < fbest) {
        fbest = f;
        arg = k;
      }
    }
    const double lo = hi * std::max(arg - 1, 0) / kScan;
    const double up = hi * std::min(arg + 1, kScan) / kScan;
    best = golden_min(cost, lo, up, kTol);
  } else {
    best = golden_min(cost, 0.0, hi, kTol);
  }
  // The ends of the bracket are never probed by the search itself.
  if (f0 < cost(best)) best = 0.0;
  if (f1 < cost(best)) best = hi;
  return finish(env, x, best);
}

CorrelationPair compare_corrected(const std::vector<CurvePoint>& env, double j_star) {
  check_env(env);
  const auto x = log_flops(env);
  return {fit_line(x, log_gap(env, 0.0)).rho, fit_line(x, log_gap(env, j_star)).rho};
}

}  // namespace dol
