#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace dol {

/// Marks the candidate an x_t sample was built from; its kernel weight is
/// scaled by 1/factor. factor = +inf removes the candidate.
struct SelfPairCorrection {
  std::size_t index;  // zero-based row in the candidate matrix
  double factor;      // C >= 1
};

/// log K(xt, x0) = -||xt - alpha x0||^2 / (2 sigma^2). Throws DomainError
/// for sigma <= 0.
double log_kernel(std::span<const double> xt, std::span<const float> x0, double alpha, double sigma);
double log_kernel(std::span<const double> xt, std::span<const double> x0, double alpha, double sigma);

/// Scratch space reused across posterior_mean calls.
struct KernelWorkspace {
  std::vector<double> log_weights;
  std::vector<double> accum;
};

/// Kernel-weighted mean of the candidate rows, evaluated in log space.
///
/// `candidates` holds L rows of xt.size() values (row-major). Weights are
/// exp(log K - max log K) after the correction shift of -ln C, so the largest
/// weight is exactly 1 and the denominator never vanishes. The mean is
/// accumulated as offsets from the heaviest candidate in a fixed left-to-right
/// order, which makes the result bit-reproducible and exact when every
/// candidate is identical.
///
/// Throws DomainError on an empty candidate set, sigma <= 0, alpha <= 0, a
/// correction index out of range, C < 1, or when the correction removes the
/// only candidate.
void posterior_mean(std::span<const double> xt, std::span<const float> candidates, double alpha,
                    double sigma, std::optional<SelfPairCorrection> correction,
                    std::span<double> out, KernelWorkspace& ws);

std::vector<double> posterior_mean(std::span<const double> xt, std::span<const float> candidates,
                                   double alpha, double sigma,
                                   std::optional<SelfPairCorrection> correction = std::nullopt);

}  // namespace dol
