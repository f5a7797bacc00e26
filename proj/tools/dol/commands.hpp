#pragma once

#include <functional>

#include "CLI11.hpp"
#include "dol/errors.hpp"
#include "io.hpp"

namespace dol::cli {

// Each adder registers one subcommand and the action to run when that
// subcommand is the one parsed.
struct Command {
  CLI::App* sub;
  std::function<void()> run;
};

Command add_estimate(CLI::App& app, const Invocation& inv);
Command add_convert(CLI::App& app, const Invocation& inv);
Command add_schedule(CLI::App& app, const Invocation& inv);
Command add_scalefit(CLI::App& app, const Invocation& inv);
Command add_generate(CLI::App& app, const Invocation& inv);

}  // namespace dol::cli
