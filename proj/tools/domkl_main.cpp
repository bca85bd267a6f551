#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "domkl/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Decentralized online multiple kernel learning experiments"};
  app.require_subcommand(1);

  domkl::cli::RunOptions run_opt;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  auto* run = app.add_subcommand("run", "Run an experiment and write results.csv");
  run->add_option("--config", run_opt.config_path, "Experiment config file")->required();
  run->add_option("--seed", seed, "Override the master seed");
  run->add_option("--trials", trials, "Override the trial count");
  run->add_option("--out", run_opt.out_dir, "Output directory");

  domkl::cli::SweepOptions sweep_opt;
  std::optional<std::uint64_t> sweep_seed;
  std::optional<std::size_t> sweep_trials;
  auto* sweep = app.add_subcommand("sweep", "Grid over rho and eta_g; writes sweep.csv");
  sweep->add_option("--config", sweep_opt.run.config_path, "Experiment config file")->required();
  sweep->add_option("--rho", sweep_opt.rhos, "Consensus penalties")->delimiter(',')->required();
  sweep->add_option("--eta-g", sweep_opt.eta_gs, "Hedge learning rates")->delimiter(',')->required();
  sweep->add_option("--seed", sweep_seed, "Override the master seed");
  sweep->add_option("--trials", sweep_trials, "Override the trial count");
  sweep->add_option("--out", sweep_opt.run.out_dir, "Output directory");

  app.add_subcommand("validate", "Run the fast invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : domkl::cli::config_error;
  }

  if (*run) {
    run_opt.seed = seed;
    run_opt.trials = trials;
    return domkl::cli::cmd_run(run_opt, std::cout, std::cerr);
  }
  if (*sweep) {
    sweep_opt.run.seed = sweep_seed;
    sweep_opt.run.trials = sweep_trials;
    return domkl::cli::cmd_sweep(sweep_opt, std::cout, std::cerr);
  }
  return domkl::cli::cmd_validate(std::cout, std::cerr);
}
