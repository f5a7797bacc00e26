#include <charconv>
#include <cmath>
#include <memory>
#include <sstream>

#include "commands.hpp"
#include "dol/estimators.hpp"
#include "dol/ingest.hpp"

namespace dol::cli {

namespace {

struct EstimateArgs {
  std::string data;
  std::string format;
  std::string estimator = "cdol";
  std::string grid;
  std::size_t subset_size = 0;
  std::size_t xt_samples = 0;
  std::size_t repeats = 0;
  std::string correction;
  std::uint64_t seed = 0;
  std::string unit = "total";
  double rel_tol = 1e-3;
  std::string out;
};

double parse_real(const std::string& text, const char* what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(std::string(what) + ": cannot parse '" + text + "'");
  }
  return v;
}

NoiseGrid parse_grid(const std::string& text) {
  const auto a = text.find(':');
  const auto b = a == std::string::npos ? a : text.find(':', a + 1);
  if (b == std::string::npos) throw ConfigError("--grid expects <logmin>:<logmax>:<steps>, got '" + text + "'");
  const double lo = parse_real(text.substr(0, a), "--grid");
  const double hi = parse_real(text.substr(a + 1, b - a - 1), "--grid");
  const double steps = parse_real(text.substr(b + 1), "--grid");
  if (!(steps >= 1.0) || steps != std::floor(steps)) throw ConfigError("--grid steps must be a positive integer");
  try {
    return NoiseGrid::linspace(lo, hi, static_cast<std::size_t>(steps));
  } catch (const SpecError& e) {
    throw ConfigError(std::string("--grid: ") + e.what());
  }
}

DataFormat pick_format(const EstimateArgs& a) {
  if (!a.format.empty()) return parse_data_format(a.format);
  const auto ext = std::filesystem::path(a.data).extension().string();
  return ext == ".csv" ? DataFormat::csv : DataFormat::dold;
}

void run(const EstimateArgs& a, const Invocation& inv) {
  const EstimatorKind kind = parse_estimator_kind(a.estimator);
  const UnitConvention unit = parse_unit(a.unit);
  const NoiseGrid grid = parse_grid(a.grid);
  const Dataset ds = load_dataset(a.data, pick_format(a));

  EstimatorConfig cfg;
  cfg.subset_size = a.subset_size;
  cfg.xt_samples = a.xt_samples;
  cfg.max_repeats = a.repeats;
  cfg.seed = a.seed;
  cfg.rel_tol = a.rel_tol;
  if (!a.correction.empty()) {
    cfg.correction = a.correction == "inf" ? EstimatorConfig::infinite_correction
                                           : parse_real(a.correction, "--correction");
  }

  const EstimateReport report = estimate_curve(ds, grid, kind, cfg, {inv.threads});
  const OptimalLossCurve curve = report.curve.in_unit(unit, ds.dim());

  std::ostringstream csv;
  csv << "log_sigma,j_star,std_err,repeats_used\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    csv << format_double(grid.log_sigma(i)) << ',' << format_double(curve.j_star[i]) << ','
        << format_double(curve.std_err[i]) << ',' << report.repeats_used[i] << '\n';
  }
  write_text(a.out, csv.str());

  const auto& r = report.config;
  json config = {
      {"data", a.data},
      {"estimator", std::string(to_string(kind))},
      {"grid", a.grid},
      {"subset_size", r.subset_size},
      {"xt_samples", r.xt_samples},
      {"max_repeats", r.max_repeats},
      {"correction", std::isinf(*r.correction) ? json("inf") : json(*r.correction)},
      {"rel_tol", r.rel_tol},
      {"unit", std::string(to_string(unit))},
      {"n_samples", ds.size()},
      {"dim", ds.dim()},
      {"a_hat", report.a_hat},
  };
  write_manifest(inv, a.out, config, a.seed, payload_checksum(ds));
}

}  // namespace

Command add_estimate(CLI::App& app, const Invocation& inv) {
  auto args = std::make_shared<EstimateArgs>();
  auto* sub = app.add_subcommand("estimate", "Estimate the optimal loss curve of a dataset");
  sub->add_option("--data", args->data, "Dataset path")->required();
  sub->add_option("--format", args->format, "dold|csv (default: from the extension)");
  sub->add_option("--estimator", args->estimator, "full|snis|dol|cdol")->capture_default_str();
  sub->add_option("--grid", args->grid, "<logmin>:<logmax>:<steps> over natural-log sigma")->required();
  sub->add_option("--subset-size", args->subset_size, "L (default min(N, 5000))");
  sub->add_option("--xt-samples", args->xt_samples, "M per repeat (default 4L; full: 3N)");
  sub->add_option("--repeats", args->repeats, "Maximum repeats R (default ceil(3N/L))");
  sub->add_option("--correction", args->correction, "C >= 1 or inf (default 4N/L)");
  sub->add_option("--seed", args->seed, "Random seed")->capture_default_str();
  sub->add_option("--unit", args->unit, "total|per-dim")->capture_default_str();
  sub->add_option("--rel-tol", args->rel_tol, "Stop repeats once se/|B| < tol; 0 disables")
      ->capture_default_str();
  sub->add_option("--out", args->out, "Output CSV (default stdout)");
  return {sub, [args, &inv] { run(*args, inv); }};
}

}  // namespace dol::cli
