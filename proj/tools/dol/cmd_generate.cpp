#include <memory>
#include <sstream>

#include "commands.hpp"
#include "dol/ingest.hpp"

namespace dol::cli {

namespace {

struct GenerateArgs {
  std::string kind = "gaussian";
  std::size_t n = 0;
  std::size_t dim = 1;
  std::uint64_t seed = 0;
  double scale = 1.0;
  std::vector<double> mean;
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> points;  // K * dim, row-major
  std::vector<double> probs;
  std::string format;
  std::string out;
};

void run(const GenerateArgs& g, const Invocation& inv) {
  SyntheticSpec spec;
  spec.n_samples = g.n;
  spec.dim = g.dim;
  spec.seed = g.seed;
  json config = {{"kind", g.kind}, {"n", g.n}, {"dim", g.dim}};
  if (g.kind == "gaussian") {
    spec.kind = IsotropicGaussian{g.mean, g.scale};
    config["scale"] = g.scale;
    config["mean"] = g.mean;
  } else if (g.kind == "two-point") {
    spec.kind = TwoPoint{g.a, g.b};
    config["a"] = g.a;
    config["b"] = g.b;
  } else if (g.kind == "mixture") {
    if (g.points.size() != g.probs.size() * g.dim) {
      throw SpecError("--points must hold one row of length --dim per entry of --probs");
    }
    FiniteMixture m;
    for (std::size_t k = 0; k < g.probs.size(); ++k) {
      m.points.emplace_back(g.points.begin() + static_cast<std::ptrdiff_t>(k * g.dim),
                            g.points.begin() + static_cast<std::ptrdiff_t>((k + 1) * g.dim));
    }
    m.probs = g.probs;
    spec.kind = m;
    config["points"] = g.points;
    config["probs"] = g.probs;
  } else {
    throw ConfigError("unknown --kind '" + g.kind + "' (gaussian|two-point|mixture)");
  }
  const Dataset ds = generate(spec);
  const DataFormat fmt = !g.format.empty() ? parse_data_format(g.format)
                         : std::filesystem::path(g.out).extension() == ".csv" ? DataFormat::csv
                                                                              : DataFormat::dold;
  if (fmt == DataFormat::dold) {
    save_dataset(ds, g.out);
  } else {
    std::ostringstream csv;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const auto row = ds.row(i);
      for (std::size_t j = 0; j < row.size(); ++j) csv << (j ? "," : "") << format_double(row[j]);
      csv << '\n';
    }
    write_text(g.out, csv.str());
  }
  write_manifest(inv, g.out, config, g.seed, payload_checksum(ds));
}

}  // namespace

Command add_generate(CLI::App& app, const Invocation& inv) {
  auto args = std::make_shared<GenerateArgs>();
  auto* sub = app.add_subcommand("generate", "Write a synthetic dataset");
  sub->add_option("--kind", args->kind, "gaussian|two-point|mixture")->capture_default_str();
  sub->add_option("--n", args->n, "Number of samples")->required();
  sub->add_option("--dim", args->dim, "Dimension")->capture_default_str();
  sub->add_option("--seed", args->seed, "Random seed")->capture_default_str();
  sub->add_option("--scale", args->scale, "Gaussian standard deviation")->capture_default_str();
  sub->add_option("--mean", args->mean, "Gaussian mean (dim values)")->delimiter(',');
  sub->add_option("--a", args->a, "Two-point atom a")->delimiter(',');
  sub->add_option("--b", args->b, "Two-point atom b")->delimiter(',');
  sub->add_option("--points", args->points, "Mixture atoms, K*dim values row-major")->delimiter(',');
  sub->add_option("--probs", args->probs, "Mixture probabilities")->delimiter(',');
  sub->add_option("--format", args->format, "dold|csv (default: from the extension)");
  sub->add_option("--out", args->out, "Output path")->required();
  return {sub, [args, &inv] { run(*args, inv); }};
}

}  // namespace dol::cli
