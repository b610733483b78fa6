// steiner-pf: phase-field Steiner tree solver.
//
//   steiner-pf solve --config F [--config G ...] [--seed N] [--out DIR]
//   steiner-pf oracle --points "x1,y1;x2,y2;..."
//   steiner-pf compare --run DIR [--thresholds F]
#include <iostream>

#include <CLI11.hpp>

#include "steiner/app.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Phase-field approximation of Steiner trees"};
  app.require_subcommand(1);

  steiner::SolveRequest solve;
  std::uint64_t seed = 0;
  std::string out_dir;
  auto* cmd_solve = app.add_subcommand("solve", "run the epsilon continuation for one or more configs");
  cmd_solve->add_option("--config", solve.configs, "config file (repeatable)")->required();
  auto* seed_opt = cmd_solve->add_option("--seed", seed, "overrides the config seed");
  auto* out_opt = cmd_solve->add_option("--out", out_dir, "output directory");

  std::string points;
  auto* cmd_oracle = app.add_subcommand("oracle", "exact Steiner tree of 2 to 4 points");
  cmd_oracle->add_option("--points", points, "points as \"x1,y1;x2,y2;...\"")->required();

  std::string run_dir;
  std::string thresholds;
  auto* cmd_compare = app.add_subcommand("compare", "score a finished run against the exact tree");
  cmd_compare->add_option("--run", run_dir, "output directory of a solve run")->required();
  auto* th_opt = cmd_compare->add_option("--thresholds", thresholds, "INI file with a [thresholds] section");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : steiner::exit_code::config_error;
  }

  if (cmd_solve->parsed()) {
    if (*seed_opt) solve.seed = seed;
    if (*out_opt) solve.out = out_dir;
    return steiner::run_solve(solve, std::cout, std::cerr);
  }
  if (cmd_oracle->parsed()) return steiner::run_oracle(points, std::cout, std::cerr);
  if (cmd_compare->parsed()) {
    std::optional<std::string> th;
    if (*th_opt) th = thresholds;
    return steiner::run_compare(run_dir, th, std::cout, std::cerr);
  }
  return steiner::exit_code::config_error;
}
