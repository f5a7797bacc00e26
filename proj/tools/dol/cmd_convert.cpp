#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "commands.hpp"
#include "dol/formulations.hpp"

namespace dol::cli {

namespace {

struct ConvertArgs {
  std::string spec;
  std::string in;
  std::string out;
  std::map<std::string, std::optional<double>> overrides{
      {"sigma_data", {}}, {"P_mean", {}},    {"P_std", {}},      {"beta_min", {}},   {"beta_max", {}},
      {"eps_t", {}},      {"sigma_min", {}}, {"sigma_max", {}},  {"logit_mean", {}}, {"logit_std", {}},
  };
};

void run(const ConvertArgs& a, const Invocation& inv) {
  FormulationSpec spec = FormulationSpec::from_name(a.spec);
  json constants = json::object();
  for (const auto& [key, value] : a.overrides) {
    if (value) spec.set_constant(key, *value);
  }
  spec.validate();
  for (const auto& [key, value] : spec.constants) constants[key] = value;

  const Table table = parse_table(read_text(a.in), a.in, 2);
  std::ostringstream csv;
  csv << "sigma_hat,x0_ve_loss,c_skip,c_out,c_in,c_noise\n";
  for (const auto& row : table.rows) {
    const double sigma_hat = to_ve_sigma(spec.process, row[0]);
    const double loss = convert_loss_to_x0_ve(spec, sigma_hat, row[1]);
    const Preconditioners c = preconditioners(spec, sigma_hat);
    csv << format_double(sigma_hat) << ',' << format_double(loss) << ',' << format_double(c.c_skip) << ','
        << format_double(c.c_out) << ',' << format_double(c.c_in) << ',' << format_double(c.c_noise) << '\n';
  }
  write_text(a.out, csv.str());
  write_manifest(inv, a.out, {{"spec", spec.name()}, {"in", a.in}, {"constants", constants}}, std::nullopt,
                 std::nullopt);
}

}  // namespace

Command add_convert(CLI::App& app, const Invocation& inv) {
  auto args = std::make_shared<ConvertArgs>();
  auto* sub = app.add_subcommand("convert", "Convert native losses to x0-prediction VE losses");
  sub->add_option("--spec", args->spec, "vp-eps|ve-F|ve-eps|fm-v|fm-v-sd3|fm-eps|fm-x0")->required();
  sub->add_option("--in", args->in, "CSV of native_sigma,native_loss")->required();
  sub->add_option("--out", args->out, "Output CSV (default stdout)");
  const std::map<std::string, std::string> flags{
      {"sigma_data", "--sigma-data"}, {"P_mean", "--p-mean"},       {"P_std", "--p-std"},
      {"beta_min", "--beta-min"},     {"beta_max", "--beta-max"},   {"eps_t", "--eps-t"},
      {"sigma_min", "--sigma-min"},   {"sigma_max", "--sigma-max"}, {"logit_mean", "--logit-mean"},
      {"logit_std", "--logit-std"},
  };
  for (const auto& [key, flag] : flags) {
    sub->add_option(flag, args->overrides[key], "Override constant " + key);
  }
  return {sub, [args, &inv] { run(*args, inv); }};
}

}  // namespace dol::cli
