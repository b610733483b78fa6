// Command implementations behind the steiner-pf executable.
#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "steiner/config.hpp"
#include "steiner/steiner_oracle.hpp"

namespace steiner {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config_error = 1;
inline constexpr int not_converged = 2;
inline constexpr int threshold_failure = 3;
}  // namespace exit_code

struct SolveRequest {
  std::vector<std::string> configs;
  std::optional<std::uint64_t> seed;
  /// Overrides the config's output dir. With several configs each run
  /// writes to <out>/<config stem>.
  std::optional<std::string> out;
};

/// Runs every config (in parallel, capped by STEINER_THREADS) and returns
/// the largest exit code.
int run_solve(const SolveRequest& req, std::ostream& out, std::ostream& err);

/// One continuation run writing all artifacts into cfg.out_dir.
int solve_config(const RunConfig& cfg, std::ostream& log);

/// Prints the exact tree of 2..4 points given as "x1,y1;x2,y2;...".
int run_oracle(const std::string& points, std::ostream& out, std::ostream& err);

struct Thresholds {
  double energy_rel = 0.12;
  double hausdorff = 0.05;
  double distance = 0.1;
  double far_field = 0.02;
  double far_distance = 0.2;
};

/// INI file with a [thresholds] section using the field names above.
Thresholds load_thresholds(const std::string& path);

struct CompareReport {
  bool has_oracle = false;
  SteinerTree oracle;
  double final_energy = 0.0;
  double energy_rel = 0.0;
  bool sublevel_nonempty = false;
  double hausdorff = 0.0;
  double distance = 0.0;
  double far_field = 0.0;
};

/// Recomputes the comparison metrics from the artifacts of a solve run.
/// Throws Error when artifacts are missing or unreadable.
CompareReport compare_run(const std::string& run_dir, const Thresholds& th);

/// Prints the report, appends it to the run's trace.json and returns 3 when
/// a metric exceeds its threshold or the sublevel set is empty.
int run_compare(const std::string& run_dir, const std::optional<std::string>& thresholds_path, std::ostream& out,
                std::ostream& err);

/// Vector-graphics overview: Omega0, the t-contour of u, the curves, the
/// terminals and an optional oracle tree.
void write_svg(std::ostream& os, const Domain& dom, const ScalarField& u, double t, const CurveBundle& bundle,
               const std::vector<Vec2>& terminals, const SteinerTree* oracle);

}  // namespace steiner
