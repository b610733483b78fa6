// Post-processing of solver output: sublevel sets, Hausdorff distances,
// distance-field errors, junction recovery and dyadic quantization of
// measures.
#pragma once

#include <vector>

#include "steiner/geodesic.hpp"
#include "steiner/problem.hpp"

namespace steiner {

/// Working-set nodes with u <= t, plus the linear crossing points of level t
/// on axis edges whose endpoints both lie in the working set. May be empty.
std::vector<Vec2> sublevel_set(const ScalarField& u, double t, const Domain& dom);

/// Symmetric Hausdorff distance between finite sets. Throws DomainError
/// when either set is empty.
double hausdorff(const std::vector<Vec2>& a, const std::vector<Vec2>& b);

/// Directed part: max over a of the distance to b.
double directed_hausdorff(const std::vector<Vec2>& a, const std::vector<Vec2>& b);

/// Sup over working-set nodes of |df - dist(., K)|.
double compare_distance_fields(const DistanceField& df, const std::vector<Vec2>& K, const Domain& dom);

/// Max |1 - u| over working-set nodes at distance >= min_dist from K.
/// Returns 0 when no node qualifies.
double far_field_deviation(const ScalarField& u, const std::vector<Vec2>& K, double min_dist, const Domain& dom);

struct MassSample {
  Vec2 point;
  double mass = 0.0;
};

/// Bins mass into half-open dyadic squares of side 2^-k. Each nonempty
/// square yields one atom at the mass-weighted mean of its samples, kept
/// inside the square and the polygon. Squares holding zero mass are
/// dropped. Throws DomainError for negative masses or zero total mass.
DiscreteMeasure quantize_measure(const std::vector<MassSample>& samples, int k, Vec2 base_point,
                                 const ConvexPolygon& poly);

/// Arc length along a at which curves a and b separate: the first vertex
/// of a farther than tol from b, stepped back to the previous vertex.
/// Returns a.length() when a never leaves b.
double divergence_arclength(const Polyline& a, const Polyline& b, double tol);

/// Separation points of every pair of curves that split at least min_offset
/// from the start and before either end.
std::vector<Vec2> junction_candidates(const CurveBundle& bundle, double tol, double min_offset);

/// Single-linkage clusters of radius `radius`; returns cluster means.
std::vector<Vec2> cluster_points(const std::vector<Vec2>& pts, double radius);

struct JunctionAngles {
  Vec2 point;
  /// Angles in degrees between consecutive branches, sorted by direction.
  std::vector<double> angles;
};

/// The junction where curves a and b separate, with the three branch
/// directions (back toward the start and forward along each curve) taken
/// to the points at arc length `arm` from it.
JunctionAngles branch_angles(const Polyline& a, const Polyline& b, double tol, double arm);

}  // namespace steiner
