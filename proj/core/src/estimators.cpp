#include "dol/estimators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "dol/kernels.hpp"
#include "dol/rng.hpp"
#include "numeric.hpp"
#include "parallel.hpp"

namespace dol {

namespace {

constexpr std::size_t kDefaultMaxSubset = 5000;
constexpr std::size_t kMinRepeatsBeforeStop = 4;
constexpr std::uint32_t kTagSubset = 0x53554253u;  // "SUBS"
constexpr std::uint32_t kTagInner = 0x494E4E52u;   // "INNR"

enum class SubsetMode { snis, cdol };

std::uint64_t point_key(std::uint64_t seed, GridPoint point) {
  return derive_key(seed, std::bit_cast<std::uint64_t>(point.sigma) ^
                              mix64(std::bit_cast<std::uint64_t>(point.alpha)));
}

void validate_point(GridPoint point) {
  if (!(point.sigma > 0.0) || !std::isfinite(point.sigma)) {
    throw DomainError("sigma must be positive and finite, got " + std::to_string(point.sigma));
  }
  if (!(point.alpha > 0.0) || !std::isfinite(point.alpha)) {
    throw DomainError("alpha must be positive and finite, got " + std::to_string(point.alpha));
  }
}

double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

// Per-worker buffers for one inner sample.
struct InnerScratch {
  std::vector<double> xt;
  std::vector<double> mean;
  KernelWorkspace kernel;

  explicit InnerScratch(std::size_t d) : xt(d), mean(d) {}
};

// Fills xt = alpha * x0 + sigma * eps from the stream's normals.
void build_xt(std::span<const float> x0, GridPoint point, CounterStream& rng, std::vector<double>& xt) {
  for (std::size_t j = 0; j < xt.size(); ++j) {
    xt[j] = point.alpha * static_cast<double>(x0[j]) + point.sigma * rng.normal();
  }
}

// Evaluates values[m] = f(m, scratch) for m in [0, count), possibly in parallel,
// then reduces them in index order.
template <typename Fn>
detail::RunningStats evaluate_inner(std::size_t count, std::size_t d, unsigned threads, Fn&& fn) {
  std::vector<double> values(count);
  detail::parallel_chunks(count, count >= 64 ? threads : 1u,
                          [&](std::size_t, std::size_t begin, std::size_t end) {
                            InnerScratch scratch(d);
                            for (std::size_t m = begin; m < end; ++m) values[m] = fn(m, scratch);
                          });
  detail::RunningStats stats;
  for (double v : values) stats.add(v);
  return stats;
}

BEstimate subset_estimate(const Dataset& ds, GridPoint point, const EstimatorConfig& cfg,
                          SubsetMode mode, ExecutionOptions exec) {
  validate_point(point);
  const std::size_t n = ds.size();
  const std::size_t d = ds.dim();
  const std::size_t L = cfg.subset_size;
  const std::size_t M = cfg.xt_samples;
  const double C = mode == SubsetMode::cdol ? *cfg.correction : 1.0;
  const std::uint64_t key = point_key(cfg.seed, point);

  detail::RunningStats across;
  detail::RunningStats last_inner;
  std::vector<float> subset(L * d);
  for (std::size_t r = 0; r < cfg.max_repeats; ++r) {
    CounterStream pick(key, 0u, static_cast<std::uint32_t>(r), kTagSubset);
    for (std::size_t l = 0; l < L; ++l) {
      const auto row = ds.row(pick.below(n));
      std::copy(row.begin(), row.end(), subset.begin() + static_cast<std::ptrdiff_t>(l * d));
    }
    const std::span<const float> cand(subset);

    last_inner = evaluate_inner(M, d, exec.threads, [&](std::size_t m, InnerScratch& s) {
      CounterStream rng(key, static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(r), kTagInner);
      if (mode == SubsetMode::snis) {
        build_xt(ds.row(rng.below(n)), point, rng, s.xt);
        posterior_mean(s.xt, cand, point.alpha, point.sigma, std::nullopt, s.mean, s.kernel);
      } else {
        const std::size_t source = rng.below(L);
        build_xt(cand.subspan(source * d, d), point, rng, s.xt);
        posterior_mean(s.xt, cand, point.alpha, point.sigma, SelfPairCorrection{source, C}, s.mean,
                       s.kernel);
      }
      return squared_norm(s.mean);
    });
    across.add(last_inner.mean());

    if (cfg.rel_tol > 0.0 && across.count() >= kMinRepeatsBeforeStop) {
      const double b = std::fabs(across.mean());
      if (b > 0.0 && across.std_error() / b < cfg.rel_tol) break;
    }
  }
  BEstimate out;
  out.b_hat = across.mean();
  out.repeats_used = across.count();
  // A single repeat has no between-repeat spread; fall back to the spread of
  // its inner samples (conditional on the subset).
  out.std_err = across.count() > 1 ? across.std_error() : last_inner.std_error();
  return out;
}

}  // namespace

std::string_view to_string(EstimatorKind kind) noexcept {
  switch (kind) {
    case EstimatorKind::full: return "full";
    case EstimatorKind::snis: return "snis";
    case EstimatorKind::dol: return "dol";
    case EstimatorKind::cdol: return "cdol";
  }
  return "?";
}

EstimatorKind parse_estimator_kind(std::string_view text) {
  if (text == "full") return EstimatorKind::full;
  if (text == "snis") return EstimatorKind::snis;
  if (text == "dol") return EstimatorKind::dol;
  if (text == "cdol") return EstimatorKind::cdol;
  throw ConfigError("unknown estimator '" + std::string(text) + "'");
}

double estimate_A(const Dataset& ds) {
  detail::CompensatedSum sum;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    double sq = 0.0;
    for (float v : ds.row(i)) sq += static_cast<double>(v) * static_cast<double>(v);
    sum.add(sq);
  }
  return sum.value() / static_cast<double>(ds.size());
}

EstimatorConfig resolve_config(const EstimatorConfig& config, std::size_t n_samples, EstimatorKind kind) {
  if (n_samples == 0) throw ConfigError("dataset is empty");
  EstimatorConfig out = config;
  const double n = static_cast<double>(n_samples);

  if (out.subset_size == 0) out.subset_size = std::min(n_samples, kDefaultMaxSubset);
  if (kind == EstimatorKind::full) out.subset_size = n_samples;
  if (out.subset_size > n_samples) {
    throw ConfigError("subset size L = " + std::to_string(out.subset_size) + " exceeds N = " +
                      std::to_string(n_samples));
  }
  const double L = static_cast<double>(out.subset_size);

  if (out.xt_samples == 0) {
    out.xt_samples = kind == EstimatorKind::full ? 3 * n_samples : 4 * out.subset_size;
  }
  if (out.max_repeats == 0) {
    out.max_repeats = kind == EstimatorKind::full ? 1 : static_cast<std::size_t>(std::ceil(3.0 * n / L));
  }
  if (kind == EstimatorKind::full) out.max_repeats = 1;

  if (kind == EstimatorKind::dol) {
    out.correction = 1.0;
  } else if (!out.correction) {
    out.correction = 4.0 * n / L;
  }
  if (!(*out.correction >= 1.0)) {
    throw ConfigError("correction C must be >= 1, got " + std::to_string(*out.correction));
  }
  if (kind == EstimatorKind::cdol && std::isinf(*out.correction) && out.subset_size < 2) {
    throw ConfigError("C = inf removes the only candidate when L = 1");
  }
  if (!(out.rel_tol >= 0.0) || !std::isfinite(out.rel_tol)) {
    throw ConfigError("rel_tol must be a finite nonnegative number");
  }
  return out;
}

BEstimate estimate_B_full(const Dataset& ds, GridPoint point, const EstimatorConfig& config,
                          ExecutionOptions exec) {
  const auto cfg = resolve_config(config, ds.size(), EstimatorKind::full);
  validate_point(point);
  const std::uint64_t key = point_key(cfg.seed, point);
  const std::size_t d = ds.dim();
  const std::span<const float> all = ds.values();
  const auto stats = evaluate_inner(cfg.xt_samples, d, exec.threads, [&](std::size_t m, InnerScratch& s) {
    CounterStream rng(key, static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(m >> 32), kTagInner);
    build_xt(ds.row(rng.below(ds.size())), point, rng, s.xt);
    posterior_mean(s.xt, all, point.alpha, point.sigma, std::nullopt, s.mean, s.kernel);
    return squared_norm(s.mean);
  });
  return {stats.mean(), stats.std_error(), 1};
}

BEstimate estimate_B_snis(const Dataset& ds, GridPoint point, const EstimatorConfig& config,
                          ExecutionOptions exec) {
  return subset_estimate(ds, point, resolve_config(config, ds.size(), EstimatorKind::snis),
                         SubsetMode::snis, exec);
}

BEstimate estimate_B_cdol(const Dataset& ds, GridPoint point, const EstimatorConfig& config,
                          ExecutionOptions exec) {
  return subset_estimate(ds, point, resolve_config(config, ds.size(), EstimatorKind::cdol),
                         SubsetMode::cdol, exec);
}

BEstimate estimate_B(const Dataset& ds, GridPoint point, EstimatorKind kind, const EstimatorConfig& config,
                     ExecutionOptions exec) {
  // At sigma = 0 the posterior is a point mass, so B = A and J* = 0 exactly.
  if (point.sigma == 0.0 && point.alpha > 0.0) {
    resolve_config(config, ds.size(), kind);
    return {estimate_A(ds), 0.0, 0};
  }
  switch (kind) {
    case EstimatorKind::full: return estimate_B_full(ds, point, config, exec);
    case EstimatorKind::snis: return estimate_B_snis(ds, point, config, exec);
    case EstimatorKind::dol:
      return subset_estimate(ds, point, resolve_config(config, ds.size(), EstimatorKind::dol),
                             SubsetMode::cdol, exec);
    case EstimatorKind::cdol: return estimate_B_cdol(ds, point, config, exec);
  }
  throw ConfigError("unknown estimator");
}

EstimateReport estimate_curve(const Dataset& ds, const NoiseGrid& grid, EstimatorKind kind,
                              const EstimatorConfig& config, ExecutionOptions exec) {
  EstimateReport report{.curve = {grid, {}, {}, UnitConvention::total}, .a_hat = 0.0, .b_hat = {},
                        .repeats_used = {}, .clamped = {}, .estimator = kind, .config = {}};
  report.estimator = kind;
  report.config = resolve_config(config, ds.size(), kind);
  report.a_hat = estimate_A(ds);

  const std::size_t points = grid.size();
  std::vector<BEstimate> results(points);
  // Spread grid points over workers when there are enough of them; otherwise
  // hand the threads to the inner loop of each point.
  const unsigned threads = std::max(1u, exec.threads);
  const bool by_point = points >= threads;
  detail::parallel_chunks(points, by_point ? threads : 1u,
                          [&](std::size_t, std::size_t begin, std::size_t end) {
                            for (std::size_t i = begin; i < end; ++i) {
                              const GridPoint p{1.0, grid.sigma(i)};
                              results[i] = estimate_B(ds, p, kind, report.config,
                                                      {by_point ? 1u : threads});
                            }
                          });

  report.curve.j_star.resize(points);
  report.curve.std_err.resize(points);
  report.b_hat.resize(points);
  report.repeats_used.resize(points);
  report.clamped.resize(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double raw = report.a_hat - results[i].b_hat;
    report.b_hat[i] = results[i].b_hat;
    report.clamped[i] = raw < 0.0;
    report.curve.j_star[i] = std::max(raw, 0.0);
    report.curve.std_err[i] = results[i].std_err;
    report.repeats_used[i] = results[i].repeats_used;
  }
  return report;
}

}  // namespace dol
