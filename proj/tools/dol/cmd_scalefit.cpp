#include <charconv>
#include <memory>

#include "commands.hpp"
#include "dol/scaling.hpp"

namespace dol::cli {

namespace {

struct ScalefitArgs {
  std::vector<std::string> curves;
  std::string offset = "search";
  std::size_t skip_first = 0;
  std::string out;
};

TrainingCurve read_curve(const std::string& path) {
  const Table t = parse_table(read_text(path), path, 2);
  const std::size_t fc = t.header.empty() ? 0 : t.column("flops");
  const std::size_t lc = t.header.empty() ? 1 : t.column("loss");
  TrainingCurve c{std::filesystem::path(path).stem().string(), {}};
  for (const auto& row : t.rows) c.points.push_back({row[fc], row[lc]});
  return c;
}

OffsetMode parse_offset(const std::string& text) {
  if (text == "search") return SearchOffset{};
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("--offset expects 'search' or a number, got '" + text + "'");
  }
  return FixedOffset{v};
}

void run(const ScalefitArgs& a, const Invocation& inv) {
  const OffsetMode mode = parse_offset(a.offset);
  std::vector<TrainingCurve> curves;
  for (const auto& p : a.curves) curves.push_back(read_curve(p));
  auto env = envelope(curves);
  env.erase(env.begin(), env.begin() + static_cast<std::ptrdiff_t>(std::min(a.skip_first, env.size())));

  const PowerLawFit fit = fit_offset_power_law(env, mode);
  const CorrelationPair rho = compare_corrected(env, fit.j_star_offset);
  json out = {
      {"alpha", fit.alpha},
      {"beta", fit.beta},
      {"j_star", fit.j_star_offset},
      {"rho", fit.rho},
      {"rho_uncorrected", rho.rho_uncorrected},
      {"n_points", env.size()},
      {"residuals", fit.residuals},
  };
  write_text(a.out, out.dump(2) + "\n");
  write_manifest(inv, a.out, {{"curves", a.curves}, {"offset", a.offset}, {"skip_first", a.skip_first}},
                 std::nullopt, std::nullopt);
}

}  // namespace

Command add_scalefit(CLI::App& app, const Invocation& inv) {
  auto args = std::make_shared<ScalefitArgs>();
  auto* sub = app.add_subcommand("scalefit", "Fit an offset power law to the envelope of training curves");
  sub->add_option("--curves", args->curves, "One CSV (flops,loss) per model size")->required();
  sub->add_option("--offset", args->offset, "search or a fixed J*")->capture_default_str();
  sub->add_option("--skip-first", args->skip_first, "Drop the first k envelope points")->capture_default_str();
  sub->add_option("--out", args->out, "Output JSON (default stdout)");
  return {sub, [args, &inv] { run(*args, inv); }};
}

}  // namespace dol::cli
