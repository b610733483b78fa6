// The potential of a curve bundle: the quadratic minimization in u with the
// curves held fixed, discretized with the 5-point Laplacian, node-lumped
// mass and a node-lumped curve term, solved by Jacobi-preconditioned CG.
#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "steiner/problem.hpp"

namespace steiner {

struct SolverError : Error {
  SolverError(const std::string& what, int iterations) : Error(what), iterations(iterations) {}
  int iterations = 0;
};

struct Triplet {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
};

/// Curve-supported bilinear form sum_i beta_i * int_{Gamma_i} u v, assembled
/// from trapezoid points on each curve against the bilinear node basis.
struct CurveMassForm {
  Grid grid;
  std::vector<Triplet> triplets;  // duplicates summed, sorted by (row, col)
  double total_weighted_length = 0.0;

  /// x^T B y.
  double apply(std::span<const double> x, std::span<const double> y) const;
  /// Row sums: the node-lumped form used by the solver.
  std::vector<double> lumped() const;
};

CurveMassForm curve_mass_form(const CurveBundle& bundle, const DiscreteMeasure& mu, const Domain& dom);

/// Row sums of curve_mass_form, computed without forming the triplets.
std::vector<double> lumped_curve_weights(const CurveBundle& bundle, const DiscreteMeasure& mu, const Grid& grid);

struct EllipticSolution {
  ScalarField u;
  int iterations = 0;
  double residual = 0.0;
};

struct SolveOptions {
  double rel_tol = 1e-10;
  /// Defaults to 20 * (nx + ny).
  std::optional<int> max_iter;
};

/// Minimizes eps |grad u|^2 + (u-1)^2/(4 eps) + (1/lambda) B_lumped(u,u)
/// with u = 1 on the box boundary. `initial` warm-starts CG.
EllipticSolution solve_potential(const CurveBundle& bundle, const DiscreteMeasure& mu, const Params& params,
                                 const Domain& dom, const ScalarField* initial = nullptr,
                                 const SolveOptions& opts = {});

/// eps * sum of cell-averaged |grad u|^2 + (1/4 eps) * sum of (u-1)^2 over
/// cells (trapezoid on corners). Matches the assembly of solve_potential.
double diffuse_energy(const ScalarField& u, const Params& params, const Domain& dom);

/// Writes `i j value` lines for the assembled system over interior nodes
/// (indices are grid node indices).
void write_system(std::ostream& os, const CurveBundle& bundle, const DiscreteMeasure& mu, const Params& params,
                  const Domain& dom);

}  // namespace steiner
