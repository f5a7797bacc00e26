#include "dol/kernels.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "dol/errors.hpp"

namespace dol {

namespace {

template <typename T>
double log_kernel_impl(std::span<const double> xt, std::span<const T> x0, double alpha, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("kernel needs sigma > 0");
  if (xt.size() != x0.size()) throw DomainError("kernel arguments differ in dimension");
  double sq = 0.0;
  for (std::size_t j = 0; j < xt.size(); ++j) {
    const double r = xt[j] - alpha * static_cast<double>(x0[j]);
    sq += r * r;
  }
  return -sq / (2.0 * sigma * sigma);
}

}  // namespace

double log_kernel(std::span<const double> xt, std::span<const float> x0, double alpha, double sigma) {
  return log_kernel_impl(xt, x0, alpha, sigma);
}

double log_kernel(std::span<const double> xt, std::span<const double> x0, double alpha, double sigma) {
  return log_kernel_impl(xt, x0, alpha, sigma);
}

void posterior_mean(std::span<const double> xt, std::span<const float> candidates, double alpha,
                    double sigma, std::optional<SelfPairCorrection> correction,
                    std::span<double> out, KernelWorkspace& ws) {
  const std::size_t d = xt.size();
  if (d == 0 || candidates.empty() || candidates.size() % d != 0) {
    throw DomainError("posterior mean needs a non-empty L x d candidate matrix");
  }
  if (!(sigma > 0.0)) throw DomainError("posterior mean needs sigma > 0");
  if (!(alpha > 0.0)) throw DomainError("posterior mean needs alpha > 0");
  if (out.size() != d) throw DomainError("output buffer has the wrong dimension");
  const std::size_t rows = candidates.size() / d;
  if (correction) {
    if (correction->index >= rows) {
      throw DomainError("correction index " + std::to_string(correction->index) + " is outside the " +
                        std::to_string(rows) + " candidates");
    }
    if (!(correction->factor >= 1.0)) throw DomainError("correction factor C must be >= 1");
  }

  const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
  auto& lw = ws.log_weights;
  lw.resize(rows);
  double max_lw = -std::numeric_limits<double>::infinity();
  std::size_t ref = rows;
  for (std::size_t l = 0; l < rows; ++l) {
    const float* x0 = candidates.data() + l * d;
    double sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double r = xt[j] - alpha * static_cast<double>(x0[j]);
      sq += r * r;
    }
    double v = -sq * inv_two_var;
    if (correction && l == correction->index) v -= std::log(correction->factor);
    lw[l] = v;
    if (v > max_lw) {
      max_lw = v;
      ref = l;
    }
  }
  if (ref == rows) throw DomainError("correction removed every candidate");

  const float* x_ref = candidates.data() + ref * d;
  auto& acc = ws.accum;
  acc.assign(d, 0.0);
  double denom = 0.0;
  for (std::size_t l = 0; l < rows; ++l) {
    const double w = std::exp(lw[l] - max_lw);
    if (w == 0.0) continue;
    denom += w;
    if (l == ref) continue;
    const float* x0 = candidates.data() + l * d;
    for (std::size_t j = 0; j < d; ++j) {
      acc[j] += w * (static_cast<double>(x0[j]) - static_cast<double>(x_ref[j]));
    }
  }
  for (std::size_t j = 0; j < d; ++j) out[j] = static_cast<double>(x_ref[j]) + acc[j] / denom;
}

std::vector<double> posterior_mean(std::span<const double> xt, std::span<const float> candidates,
                                   double alpha, double sigma,
                                   std::optional<SelfPairCorrection> correction) {
  std::vector<double> out(xt.size());
  KernelWorkspace ws;
  posterior_mean(xt, candidates, alpha, sigma, correction, out, ws);
  return out;
}

}  // namespace dol
