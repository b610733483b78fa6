// Alternating minimization of the phase-field energy over (u, curves):
// potential step, geodesic step, Ahlfors enforcement, and continuation in
// epsilon.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "steiner/elliptic.hpp"
#include "steiner/problem.hpp"

namespace steiner {

struct EnergyBreakdown {
  double diffuse = 0.0;
  double geodesic = 0.0;
  double total = 0.0;
};

/// Pointwise metric delta + u^2 at the nodes.
ScalarField metric_field(const ScalarField& u, const Params& params);

/// diffuse_energy(u) + (1/lambda) sum_i beta_i * path_integral(delta + u^2, curve_i).
EnergyBreakdown energy(const ScalarField& u, const CurveBundle& bundle, const DiscreteMeasure& mu,
                       const Params& params, const Domain& dom);

/// Geodesics of delta + u^2 from the base point to every atom, resampled at
/// constant speed (spacing about h/2). Atoms at the base point get a
/// degenerate curve.
CurveBundle best_curves(const ScalarField& u, const DiscreteMeasure& mu, const Params& params, const Domain& dom);

struct IterationRecord {
  int k = 0;
  double total = 0.0;
  double diffuse = 0.0;
  double geodesic = 0.0;
  double length = 0.0;
  int replacements = 0;
  int cg_iters = 0;
  bool curves_accepted = true;
};

struct SolveTrace {
  Params params;
  std::vector<IterationRecord> iterations;
  std::optional<ScalarField> u;
  CurveBundle bundle;
  bool converged = false;
};

struct AlternateOptions {
  double tol = 1e-6;
  int max_iter = 200;
  SolveOptions solver;
};

/// Loop: u <- potential(bundle); candidate <- enforce_ahlfors(best_curves(u)).
/// The candidate replaces the bundle when it does not raise the energy at
/// the current u, so the recorded totals never increase. Stops when the
/// relative decrease of the total falls below tol, or after max_iter.
SolveTrace alternate(const DiscreteMeasure& mu, const Params& params, const Domain& dom, const CurveBundle& init,
                     const AlternateOptions& opts, const ScalarField* init_u = nullptr);

struct Rung {
  double epsilon = 0.0;
  double lambda = 0.0;
};

struct ContinuationOptions {
  AlternateOptions alternate;
  bool warm_start_u = true;
  /// Extra first-rung starts from chained initial bundles, each following a
  /// random terminal order; the lowest final energy wins.
  int restarts = 0;
  std::uint64_t seed = 0;
};

/// Throws ParameterError unless epsilon strictly decreases and every rung
/// is admissible for make_params.
void validate_schedule(const std::vector<Rung>& schedule, double beta_exp);

/// Runs alternate on every rung, warm-starting from the previous one. The
/// first rung starts from straight segments.
std::vector<SolveTrace> continuation(const DiscreteMeasure& mu, const Domain& dom, const std::vector<Rung>& schedule,
                                     double beta_exp, const ContinuationOptions& opts);

/// Chain initialization: curve for atom order[m] visits atoms order[0..m].
CurveBundle chained_bundle(const DiscreteMeasure& mu, const std::vector<std::size_t>& order);

/// Largest step-to-step energy increase, normalized by 1 + |E_first|.
double max_relative_increase(const SolveTrace& trace);

nlohmann::ordered_json params_json(const Params& p);
/// {params, iterations:[...], final:{field_ref, curves}}.
nlohmann::ordered_json trace_json(const SolveTrace& trace, const std::string& field_ref);
void write_trace_csv(std::ostream& os, const std::vector<SolveTrace>& traces);

}  // namespace steiner
