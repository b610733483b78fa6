#include "steiner/geodesic.hpp"

#include <functional>
#include <limits>
#include <queue>

#include "steiner/point_index.hpp"

namespace steiner {

const std::vector<std::pair<int, int>>& stencil16() {
  static const std::vector<std::pair<int, int>> offsets = {
      {1, 0},  {-1, 0},  {0, 1},  {0, -1},                                   // axis
      {1, 1},  {1, -1},  {-1, 1}, {-1, -1},                                  // diagonal
      {2, 1},  {2, -1},  {-2, 1}, {-2, -1}, {1, 2}, {1, -2}, {-1, 2}, {-1, -2}  // knight
  };
  return offsets;
}

DistanceField distance_field(const ScalarField& w, Vec2 source, const Domain& dom) {
  const Grid& g = dom.grid();
  if (!(w.grid() == g)) throw DomainError("metric field lives on a different grid");
  if (!point_in_omega0(source, dom.omega0(), 1e-9)) throw DomainError("geodesic source lies outside omega0");

  DistanceField df;
  df.grid = g;
  df.source = source;
  df.values.assign(g.size(), std::numeric_limits<double>::infinity());
  df.predecessor.assign(g.size(), -1);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!dom.in_omega0(k)) continue;
    if (w[k] < 0.0) throw DomainError("metric must be nonnegative on omega0");
    df.metric_sup = std::max(df.metric_sup, w[k]);
  }

  // edge lengths per stencil entry
  const auto& st = stencil16();
  std::vector<double> step_len(st.size());
  for (std::size_t s = 0; s < st.size(); ++s) step_len[s] = std::hypot(st[s].first * g.hx, st[s].second * g.hy);

  df.source_node = dom.nearest_omega0_node(source);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  std::vector<char> done(g.size(), 0);
  df.values[df.source_node] = 0.0;
  queue.push({0.0, df.source_node});
  while (!queue.empty()) {
    const auto [d, k] = queue.top();
    queue.pop();
    if (done[k]) continue;
    done[k] = 1;
    const int i = g.col(k);
    const int j = g.row(k);
    for (std::size_t s = 0; s < st.size(); ++s) {
      const int ni = i + st[s].first;
      const int nj = j + st[s].second;
      if (ni < 0 || nj < 0 || ni >= g.nx || nj >= g.ny) continue;
      const std::size_t q = g.index(ni, nj);
      if (done[q] || !dom.in_omega0(q)) continue;
      const double nd = d + 0.5 * (w[k] + w[q]) * step_len[s];
      if (nd < df.values[q] || (nd == df.values[q] && static_cast<std::int64_t>(k) < df.predecessor[q])) {
        df.values[q] = nd;
        df.predecessor[q] = static_cast<std::int64_t>(k);
        queue.push({nd, q});
      }
    }
  }
  return df;
}

Polyline shortest_path(const DistanceField& df, Vec2 target, const Domain& dom) {
  if (!point_in_omega0(target, dom.omega0(), 1e-9)) throw DomainError("path target lies outside omega0");
  const std::size_t end = dom.nearest_omega0_node(target);
  if (!std::isfinite(df.values[end])) throw Error("path target is unreachable from the source");
  if (end == df.source_node) return Polyline({df.source, target});

  std::vector<Vec2> pts;
  pts.push_back(target);
  for (std::int64_t k = static_cast<std::int64_t>(end);; k = df.predecessor[static_cast<std::size_t>(k)]) {
    pts.push_back(df.grid.point(static_cast<std::size_t>(k)));
    if (static_cast<std::size_t>(k) == df.source_node) break;
    if (df.predecessor[static_cast<std::size_t>(k)] < 0) throw Error("broken predecessor chain");
  }
  pts.push_back(df.source);
  std::reverse(pts.begin(), pts.end());
  return Polyline(std::move(pts)).simplified();
}

double path_integral(const ScalarField& w, const Polyline& curve) {
  double sum = 0.0;
  curve_quadrature(curve, curve_step(w.grid()), [&](Vec2 p, double weight) { sum += weight * w.eval(p); });
  return sum;
}

ScalarField distance_to_set(const std::vector<Vec2>& K, const Domain& dom) {
  if (K.empty()) throw DomainError("distance to an empty set");
  const PointIndex index(K);
  const Grid& g = dom.grid();
  std::vector<double> v(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) v[k] = index.nearest_distance(g.point(k));
  return ScalarField(g, std::move(v));
}

}  // namespace steiner
