#include "dol/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "dol/errors.hpp"
#include "numeric.hpp"

namespace dol {

double gaussian_jstar(const GaussianOracle& oracle, double alpha, double sigma) {
  if (!(sigma >= 0.0)) throw DomainError("gaussian oracle needs sigma >= 0");
  if (!(alpha > 0.0)) throw DomainError("gaussian oracle needs alpha > 0");
  if (!(oracle.scale > 0.0)) throw DomainError("gaussian oracle needs scale > 0");
  if (std::isinf(sigma)) return static_cast<double>(oracle.dim) * oracle.scale * oracle.scale;
  const double s2 = oracle.scale * oracle.scale;
  const double v2 = sigma * sigma;
  return static_cast<double>(oracle.dim) * s2 * v2 / (alpha * alpha * s2 + v2);
}

HermiteRule gauss_hermite(std::size_t n) {
  if (n == 0 || n > 512) throw DomainError("Gauss-Hermite rule supports 1..512 nodes");
  // Roots of the physicists' Hermite polynomial by Newton iteration on the
  // orthonormal recurrence, then rescaled to the standard normal.
  const double pim4 = 1.0 / std::pow(std::numbers::pi, 0.25);
  const double dn = static_cast<double>(n);
  std::vector<double> x(n), w(n);
  const std::size_t half = (n + 1) / 2;
  double z = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * dn + 1.0) - 1.85575 * std::pow(2.0 * dn + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(dn, 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * x[1];
    } else {
      z = 2.0 * z - x[i - 2];
    }
    double pp = 0.0;
    for (int it = 0; it < 200; ++it) {
      // Hermite functions carry the exp(-z^2/2) factor, which keeps the
      // recurrence in range for the outer roots of large rules.
      double p1 = pim4 * std::exp(-0.5 * z * z), p2 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double dj = static_cast<double>(j);
        p1 = z * std::sqrt(2.0 / dj) * p2 - std::sqrt((dj - 1.0) / dj) * p3;
      }
      pp = std::sqrt(2.0 * dn) * p2;
      const double step = p1 / (pp - z * p1);
      z -= step;
      if (std::fabs(step) <= 1e-15 * std::max(1.0, std::fabs(z))) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = w[n - 1 - i] = 2.0 * std::exp(-z * z) / (pp * pp);
  }
  HermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
  for (std::size_t i = 0; i < n; ++i) {
    rule.nodes[i] = -std::numbers::sqrt2 * x[i];  // x is descending
    rule.weights[i] = w[i] * inv_sqrt_pi;
  }
  return rule;
}

namespace {

constexpr double kTruncation = 9.5;  // standard-normal tail mass ~2e-21
constexpr double kConvergenceTol = 1e-12;

// Equispaced rule for E f(Z) on [-kTruncation, kTruncation]. For integrands
// analytic in a strip it converges geometrically, and unlike Gauss-Hermite
// its spacing stays uniform where posterior transitions sit, so node
// doubling settles much sooner.
HermiteRule gaussian_trapezoid(std::size_t n) {
  HermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double h = 2.0 * kTruncation / static_cast<double>(n - 1);
  detail::CompensatedSum total;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = -kTruncation + h * static_cast<double>(i);
    rule.nodes[i] = z;
    rule.weights[i] = std::exp(-0.5 * z * z);
    total.add(rule.weights[i]);
  }
  for (double& w : rule.weights) w /= total.value();
  return rule;
}

double mixture_with_rule(std::span<const double> points, std::size_t dim, std::span<const double> probs,
                         double alpha, double sigma, const HermiteRule& rule) {
  const std::size_t K = probs.size();
  const std::size_t n = rule.nodes.size();
  const std::size_t cells = dim == 1 ? n : n * n;
  const double inv_two_var = 1.0 / (2.0 * sigma * sigma);

  std::vector<double> logw(K), mean(dim), eps(dim), xt(dim);
  detail::CompensatedSum acc;
  for (std::size_t k = 0; k < K; ++k) {
    if (probs[k] == 0.0) continue;
    const double* xk = points.data() + k * dim;
    for (std::size_t c = 0; c < cells; ++c) {
      double wq = rule.weights[c % n];
      eps[0] = rule.nodes[c % n];
      if (dim == 2) {
        wq *= rule.weights[c / n];
        eps[1] = rule.nodes[c / n];
      }
      if (wq == 0.0) continue;
      for (std::size_t j = 0; j < dim; ++j) xt[j] = alpha * xk[j] + sigma * eps[j];

      double max_lw = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < K; ++i) {
        if (probs[i] == 0.0) {
          logw[i] = -std::numeric_limits<double>::infinity();
          continue;
        }
        double sq = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
          const double r = xt[j] - alpha * points[i * dim + j];
          sq += r * r;
        }
        logw[i] = std::log(probs[i]) - sq * inv_two_var;
        max_lw = std::max(max_lw, logw[i]);
      }
      // Posterior variance, two passes about the posterior mean.
      double denom = 0.0;
      std::fill(mean.begin(), mean.end(), 0.0);
      for (std::size_t i = 0; i < K; ++i) {
        const double wi = std::exp(logw[i] - max_lw);
        logw[i] = wi;
        denom += wi;
        for (std::size_t j = 0; j < dim; ++j) mean[j] += wi * (points[i * dim + j] - xk[j]);
      }
      for (std::size_t j = 0; j < dim; ++j) mean[j] = xk[j] + mean[j] / denom;
      double var = 0.0;
      for (std::size_t i = 0; i < K; ++i) {
        if (logw[i] == 0.0) continue;
        double sq = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
          const double r = points[i * dim + j] - mean[j];
          sq += r * r;
        }
        var += logw[i] * sq;
      }
      acc.add(probs[k] * wq * var / denom);
    }
  }
  return std::max(acc.value(), 0.0);
}

}  // namespace

double finite_mixture_jstar(std::span<const double> points, std::size_t dim,
                            std::span<const double> probs, double alpha, double sigma,
                            std::size_t quadrature_nodes) {
  if (dim == 0) throw SpecError("mixture dimension must be positive");
  if (dim > 2) {
    throw UnsupportedError("mixture quadrature supports d <= 2, got d = " + std::to_string(dim));
  }
  const std::size_t K = probs.size();
  if (K == 0 || points.size() != K * dim) throw SpecError("mixture needs K >= 1 points of length d");
  detail::CompensatedSum total;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw SpecError("mixture probabilities must be nonnegative");
    total.add(p);
  }
  if (std::fabs(total.value() - 1.0) > 1e-12) throw SpecError("mixture probabilities must sum to 1");
  for (double v : points) {
    if (!std::isfinite(v)) throw SpecError("mixture points must be finite");
  }
  if (quadrature_nodes < 32) throw DomainError("mixture quadrature needs at least 32 nodes");
  if (!(sigma >= 0.0)) throw DomainError("mixture oracle needs sigma >= 0");
  if (!(alpha > 0.0)) throw DomainError("mixture oracle needs alpha > 0");
  if (sigma == 0.0) return 0.0;

  const std::size_t cap = dim == 1 ? 16384 : 1024;
  std::size_t n = std::min(quadrature_nodes, cap);
  double value = mixture_with_rule(points, dim, probs, alpha, sigma, gaussian_trapezoid(n));
  while (n < cap) {
    n *= 2;
    const double finer = mixture_with_rule(points, dim, probs, alpha, sigma, gaussian_trapezoid(n));
    const bool settled = std::fabs(finer - value) <= kConvergenceTol * std::max(1.0, finer);
    value = finer;
    if (settled) break;
  }
  return value;
}

}  // namespace dol
