#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace pipeslip::cli;
  CLI::App app{"Perturbations of Poiseuille flow in a slip pipe: linear, swirl and nonlinear solvers"};
  app.require_subcommand(1);

  std::string config;
  std::string out = ".";
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  const std::map<std::string, std::string> help = {
      {"solve-linear", "one Fourier mode of the meridional stream problem"},
      {"solve-swirl", "one Fourier mode of the swirl problem"},
      {"sweep", "gated solves over a (phi, xi, alpha) grid with scaling fits"},
      {"inequalities", "random-polynomial checks of the functional inequalities"},
      {"regimes", "regime labels and beta, theta over a parameter grid"},
      {"solve-nonlinear", "Picard iteration for the periodic nonlinear problem"},
  };
  for (const auto& name : command_names()) {
    auto* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", config, "configuration file (.ini grammar, or .json)")->required();
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--threads", threads, "worker threads, overrides [run] threads")->check(CLI::Range(1, 256));
    sub->add_option("--seed", seed, "random seed, overrides [run] seed");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config_error;
  }

  CommandOptions options;
  options.out_dir = out;
  options.overrides.threads = threads;
  options.overrides.seed = seed;
  const auto* sub = app.get_subcommands().front();
  return run_command_file(sub->get_name(), config, options, std::cerr);
}
