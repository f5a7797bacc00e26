#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dol {

/// x0 ~ N(mean, scale^2 I) in `dim` dimensions.
struct GaussianOracle {
  std::vector<double> mean;  // empty means the origin
  double scale = 1.0;
  std::size_t dim = 1;
};

/// Exact optimal loss d s^2 sigma^2 / (alpha^2 s^2 + sigma^2), total units.
/// Throws DomainError for sigma < 0, alpha <= 0 or scale <= 0.
double gaussian_jstar(const GaussianOracle& oracle, double alpha, double sigma);

/// Gauss-Hermite rule for the standard normal: sum_i w_i f(x_i) ~ E f(Z).
struct HermiteRule {
  std::vector<double> nodes;    // ascending
  std::vector<double> weights;  // sum to 1
};

HermiteRule gauss_hermite(std::size_t nodes);

/// Optimal loss of a discrete distribution: `points` holds K rows of `dim`
/// values, `probs` their masses. Integrates the posterior variance of x0
/// given x_t over each component's Gaussian with a tensor equispaced rule on
/// [-9.5, 9.5] standard deviations, starting from `quadrature_nodes` per axis
/// and doubling until two passes agree to 1e-12 (relative above 1).
///
/// Throws UnsupportedError for dim > 2, DomainError for nodes < 32, sigma < 0
/// or alpha <= 0, SpecError for malformed points/probs.
double finite_mixture_jstar(std::span<const double> points, std::size_t dim,
                            std::span<const double> probs, double alpha, double sigma,
                            std::size_t quadrature_nodes = 64);

}  // namespace dol
