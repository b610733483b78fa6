// Run configuration: INI text with [domain], [measure], [schedule] and
// [output] sections. Comments take whole lines starting with ';' or '#'.
// eta0, weights and lambda are optional; weights default to 1/(N+1) per
// atom and lambda to epsilon.
//
//   [domain]
//   polygon = 0,0; 1,0; 1,1; 0,1
//   nx = 257
//   ny = 257
//   eta0 = 0.35
//
//   [measure]
//   base = 0,0.5
//   atoms = 1,0.5
//   weights = 0.5
//
//   [schedule]
//   epsilon = 0.08, 0.04, 0.02
//   lambda = 0.08, 0.04, 0.02
//   beta = 1.5
//   tol = 1e-6
//   max_iter = 200
//   restarts = 0
//   seed = 0
//
//   [output]
//   dir = out
//   threshold = 0.5
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "steiner/optimizer.hpp"
#include "steiner/problem.hpp"

namespace steiner {

struct ConfigError : Error {
  using Error::Error;
};

struct RunConfig {
  std::vector<Vec2> polygon;
  int nx = 129;
  int ny = 129;
  std::optional<double> eta0;

  Vec2 base;
  std::vector<Vec2> atoms;
  std::vector<double> weights;

  std::vector<Rung> schedule;
  double beta_exp = 1.5;
  double tol = 1e-6;
  int max_iter = 200;
  int restarts = 0;
  std::uint64_t seed = 0;

  std::string out_dir = "out";
  double threshold = 0.5;

  friend bool operator==(const RunConfig& a, const RunConfig& b);
};

/// Throws ConfigError on syntax errors, missing keys, malformed values and
/// parameters outside their admissible ranges.
RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::string& path);
void write_config(std::ostream& os, const RunConfig& cfg);

/// Objects built from a validated config.
struct Problem {
  Domain domain;
  DiscreteMeasure measure;
};
Problem build_problem(const RunConfig& cfg);

/// Base point followed by the atoms, duplicates removed.
std::vector<Vec2> terminals(const RunConfig& cfg);

/// Warnings that do not stop a run (grid coarser than epsilon/3).
std::vector<std::string> config_warnings(const RunConfig& cfg);

std::vector<Vec2> parse_point_list(const std::string& text);

}  // namespace steiner
