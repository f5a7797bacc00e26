#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>

#include "commands.hpp"
#include "dol/schedule.hpp"

namespace dol::cli {

namespace {

struct ScheduleArgs {
  std::string jstar;
  std::string gaps;
  std::string state;
  std::optional<double> a;
  std::optional<double> w_star;
  std::optional<double> sigma_star;
  std::optional<double> mu;
  std::optional<double> varsigma;
  double threshold_frac = 0.01;
  double decay = 0.9;
  std::optional<double> gap_floor;
  std::string out;
};

void require_aligned(const std::vector<double>& expected, const std::vector<double>& got, const std::string& what) {
  if (expected.size() != got.size()) {
    throw AlignmentError(what + " has " + std::to_string(got.size()) + " points, the J* grid has " +
                         std::to_string(expected.size()));
  }
  for (std::size_t i = 0; i < got.size(); ++i) {
    if (std::fabs(got[i] - expected[i]) > 1e-9 * std::max(1.0, std::fabs(expected[i]))) {
      throw AlignmentError(what + " log_sigma " + format_double(got[i]) + " does not match J* grid value " +
                           format_double(expected[i]));
    }
  }
}

OptimalLossCurve read_curve(const std::string& path) {
  const Table t = parse_table(read_text(path), path, 2);
  if (t.header.empty()) throw FormatError(path + ": J* CSV needs a header with log_sigma and j_star");
  const std::size_t ls = t.column("log_sigma");
  const std::size_t js = t.column("j_star");
  std::vector<double> x, j;
  for (const auto& row : t.rows) {
    x.push_back(row[ls]);
    j.push_back(row[js]);
  }
  NoiseGrid grid = [&] {
    try {
      return NoiseGrid(x);
    } catch (const SpecError& e) {
      throw FormatError(path + ": " + e.what());
    }
  }();
  return {std::move(grid), j, std::vector<double>(j.size(), 0.0), UnitConvention::total};
}

void run(const ScheduleArgs& a, const Invocation& inv) {
  const OptimalLossCurve curve = read_curve(a.jstar);
  const JStarInterpolant jstar(curve);
  const WeightParams params = resolve_weight_params(
      curve, {a.a, a.w_star, a.sigma_star, a.mu, a.varsigma}, a.threshold_frac);
  const double plateau = jstar.values().back();
  const double floor = a.gap_floor.value_or(plateau > 0.0 ? 1e-6 * plateau : 1e-12);

  std::vector<double> weights(curve.grid.size());
  for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = loss_weight(jstar, params, curve.grid.sigma(i));

  const Table measured = parse_table(read_text(a.gaps), a.gaps, 2);
  std::vector<double> mx, observed;
  for (std::size_t i = 0; i < measured.rows.size(); ++i) mx.push_back(measured.rows[i][0]);
  require_aligned(curve.grid.log_sigmas(), mx, a.gaps);
  for (std::size_t i = 0; i < measured.rows.size(); ++i) {
    observed.push_back(weights[i] * (measured.rows[i][1] - jstar.values()[i]));
  }

  const GapBins bins = [&] {
    if (a.state.empty()) return initial_gap_bins(curve.grid, observed, a.decay, floor);
    const json prev = json::parse(read_text(a.state), nullptr, false);
    if (prev.is_discarded() || !prev.contains("gap_bins")) throw FormatError(a.state + ": not a schedule file");
    try {
      const auto px = prev["gap_bins"]["log_sigma"].get<std::vector<double>>();
      require_aligned(curve.grid.log_sigmas(), px, a.state);
      const GapBins previous{curve.grid, prev["gap_bins"]["gaps"].get<std::vector<double>>(), a.decay, floor};
      return update_gap_bins(previous, observed);
    } catch (const json::exception& e) {
      throw FormatError(a.state + ": " + e.what());
    }
  }();
  const PiecewisePdf pdf = adaptive_pdf(bins);

  json out;
  out["weight_table"] = json::array();
  out["pdf_knots"] = json::array();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    out["weight_table"].push_back({curve.grid.log_sigma(i), weights[i]});
    out["pdf_knots"].push_back({pdf.log_sigma[i], pdf.density[i]});
  }
  out["params"] = {
      {"a", params.a},
      {"w_star", params.w_star},
      {"sigma_star", params.sigma_star},
      {"mu", params.mu},
      {"varsigma", params.varsigma},
      {"threshold_frac", a.threshold_frac},
      {"decay", a.decay},
      {"gap_floor", floor},
      {"uniform_fallback", pdf.uniform_fallback},
  };
  out["gap_bins"] = {{"log_sigma", curve.grid.log_sigmas()}, {"gaps", bins.gaps}};
  write_text(a.out, out.dump(2) + "\n");
  write_manifest(inv, a.out, {{"jstar", a.jstar}, {"gaps", a.gaps}, {"state", a.state}, {"params", out["params"]}},
                 std::nullopt, std::nullopt);
}

}  // namespace

Command add_schedule(CLI::App& app, const Invocation& inv) {
  auto args = std::make_shared<ScheduleArgs>();
  auto* sub = app.add_subcommand("schedule", "Build the loss weight and adaptive noise density");
  sub->add_option("--jstar", args->jstar, "Optimal-loss CSV from `dol estimate`")->required();
  sub->add_option("--gaps", args->gaps, "CSV of log_sigma,measured_loss on the same grid")->required();
  sub->add_option("--state", args->state, "Previous schedule JSON whose gap bins are updated");
  sub->add_option("--a", args->a, "Scale on 1/J* (default 1)");
  sub->add_option("--w-star", args->w_star, "Cutoff on 1/J* (default 1/J*(sigma*))");
  sub->add_option("--sigma-star", args->sigma_star, "Critical point (default: detected)");
  sub->add_option("--mu", args->mu, "Bump centre in log sigma (default log sigma* - 1)");
  sub->add_option("--varsigma", args->varsigma, "Bump width (default 0.5)");
  sub->add_option("--threshold-frac", args->threshold_frac, "Critical point threshold")->capture_default_str();
  sub->add_option("--decay", args->decay, "EMA retention")->capture_default_str();
  sub->add_option("--gap-floor", args->gap_floor, "Floor on gaps (default 1e-6 * max J*)");
  sub->add_option("--out", args->out, "Output JSON (default stdout)");
  return {sub, [args, &inv] { run(*args, inv); }};
}

}  // namespace dol::cli
