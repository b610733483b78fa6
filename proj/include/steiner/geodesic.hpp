// Weighted geodesic distance on the grid graph over the working set, with
// predecessor links for path extraction and curve integrals of grid fields.
#pragma once

#include <cstdint>
#include <vector>

#include "steiner/problem.hpp"

namespace steiner {

/// Shortest-path values from a source over the 16-neighbour graph restricted
/// to nodes of the working set. Nodes outside carry +inf and no predecessor.
struct DistanceField {
  Grid grid;
  std::vector<double> values;
  std::vector<std::int64_t> predecessor;
  Vec2 source;
  std::size_t source_node = 0;
  double metric_sup = 0.0;

  double at(std::size_t node) const { return values[node]; }
};

/// The 16 stencil offsets: axis, diagonal and knight moves.
const std::vector<std::pair<int, int>>& stencil16();

/// Dijkstra with edge weight (w(p)+w(q))/2 * |p-q|. Ties pop in index order.
/// Throws DomainError for a source outside the working set or a negative
/// metric value on it.
DistanceField distance_field(const ScalarField& w, Vec2 source, const Domain& dom);

/// Backtracks from the working-set node nearest to target. The polyline
/// starts at the exact source and ends at the exact target; interior
/// vertices are grid nodes.
Polyline shortest_path(const DistanceField& df, Vec2 target, const Domain& dom);

/// Visits trapezoid quadrature points of a polyline: each segment is split
/// into ceil(length/step) equal pieces. Callback signature f(point, weight).
template <class F>
void curve_quadrature(const Polyline& curve, double step, F&& f) {
  const auto& pts = curve.points();
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double len = curve.segment_length(k);
    if (len <= 0.0) continue;
    const int pieces = std::max(1, static_cast<int>(std::ceil(len / step)));
    const double w = len / pieces;
    const Vec2 a = pts[k];
    const Vec2 d = pts[k + 1] - a;
    for (int m = 0; m <= pieces; ++m) {
      const double weight = (m == 0 || m == pieces) ? 0.5 * w : w;
      f(m == pieces ? pts[k + 1] : a + (static_cast<double>(m) / pieces) * d, weight);
    }
  }
}

/// Quadrature step used along curves for a given grid.
inline double curve_step(const Grid& grid) { return 0.5 * grid.hmin(); }

/// Composite trapezoid approximation of the integral of w along the curve.
double path_integral(const ScalarField& w, const Polyline& curve);

/// Euclidean distance from every grid node to the nearest point of K.
ScalarField distance_to_set(const std::vector<Vec2>& K, const Domain& dom);

}  // namespace steiner
