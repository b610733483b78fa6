// Curve-bundle surgery: Ahlfors ratios, arc replacement inside a ball,
// constant-speed resampling and ball coverings of the bundle image.
#pragma once

#include <vector>

#include "steiner/problem.hpp"

namespace steiner {

struct AhlforsWitness {
  std::size_t curve = 0;
  Vec2 center;
  double radius = 0.0;
};

struct AhlforsReport {
  double worst_ratio = 0.0;
  AhlforsWitness witness;
};

/// Exact length of the curve inside the closed disc B(center, r).
double arc_length_in_ball(const Polyline& curve, Vec2 center, double r);

/// Radii 2^-j * diam for j = 0..ceil(log2(diam/h)). Empty for a curve of
/// zero diameter.
std::vector<double> scan_radii(const Polyline& curve, double h);

/// Max over centers (vertices and segment midpoints) and radii of
/// arc_length_in_ball / r.
AhlforsReport ahlfors_scan(const Polyline& curve, const std::vector<double>& radii);

/// Replaces the part of curve i0 between its first entry into and last
/// exit from the closed ball B(x, r) by the straight chord. The entry is
/// the start when the base point lies in the ball, the exit is the end when
/// the atom does. Throws DomainError when x is farther than membership_tol
/// from curve i0.
CurveBundle replace_arc(const CurveBundle& bundle, std::size_t i0, Vec2 x, double r, const ConvexPolygon& poly,
                        double membership_tol);

struct EnforceResult {
  CurveBundle bundle;
  int replacements = 0;
};

/// Applies replace_arc until no scanned ball carries an arc ratio of at
/// least lambda_cap. Among violations, the largest radius goes first. The
/// scan resolution h is taken from the grid of u.
EnforceResult enforce_ahlfors(const CurveBundle& bundle, const ScalarField& u, const Params& params,
                              const ConvexPolygon& poly);

/// n_points samples at equal arc-length spacing; endpoints are kept exactly.
Polyline reparametrize_constant_speed(const Polyline& curve, int n_points);

struct Ball {
  Vec2 center;
  double radius = 0.0;
};

/// Greedy covering of the bundle image by closed balls of radius rho whose
/// centers lie on the curves at pairwise distance > 2 rho / 5.
std::vector<Ball> tube_covering(const CurveBundle& bundle, double rho);

/// Diameter of the union of the curve images (vertex based).
double bundle_diameter(const CurveBundle& bundle);

}  // namespace steiner
