#include <iostream>
#include <optional>
#include <vector>

#include "commands.hpp"
#include "dol/errors.hpp"

namespace {

int exit_code(dol::ErrorKind kind) {
  using dol::ErrorKind;
  switch (kind) {
    case ErrorKind::Format:
    case ErrorKind::Data:
    case ErrorKind::Io:
      return 2;
    case ErrorKind::Domain:
    case ErrorKind::Extrapolation:
      return 4;
    default:
      return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  dol::cli::Invocation inv;
  inv.started = std::chrono::steady_clock::now();
  inv.argv.assign(argv, argv + argc);

  CLI::App app{"Optimal-loss estimation, formulation conversion, schedules and scaling fits", "dol"};
  app.set_version_flag("--version", DOLKIT_VERSION_STRING);
  app.require_subcommand(1);
  std::optional<unsigned> threads;
  bool no_manifest = false;
  app.add_option("--threads", threads, "Worker threads (default: DOL_THREADS, then all cores)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--no-manifest", no_manifest, "Do not write <out>.manifest.json");

  const std::vector<dol::cli::Command> commands{
      dol::cli::add_estimate(app, inv), dol::cli::add_convert(app, inv),
      dol::cli::add_schedule(app, inv), dol::cli::add_scalefit(app, inv),
      dol::cli::add_generate(app, inv)};
  for (const auto& c : commands) c.sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    inv.threads = dol::cli::resolve_threads(threads);
    inv.write_manifest = !no_manifest;
    for (const auto& c : commands) {
      if (c.sub->parsed()) c.run();
    }
  } catch (const dol::Error& e) {
    std::cerr << e.kind_name() << ": " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
