#include "steiner/analysis.hpp"

#include <limits>
#include <map>
#include <numbers>

#include "steiner/point_index.hpp"

namespace steiner {

namespace {

struct Projection {
  double dist = std::numeric_limits<double>::infinity();
  double arclength = 0.0;
};

Projection project_to_polyline(Vec2 p, const Polyline& c) {
  Projection best;
  const auto& pts = c.points();
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const Vec2 d = pts[k + 1] - pts[k];
    const double len2 = dot(d, d);
    const double t = len2 > 0.0 ? std::clamp(dot(p - pts[k], d) / len2, 0.0, 1.0) : 0.0;
    const double dist = distance(p, pts[k] + t * d);
    if (dist < best.dist) best = {dist, c.cumulative()[k] + t * c.segment_length(k)};
  }
  return best;
}

}  // namespace

std::vector<Vec2> sublevel_set(const ScalarField& u, double t, const Domain& dom) {
  if (!(t > 0.0 && t < 1.0)) throw ParameterError("sublevel threshold must lie in (0,1)");
  const Grid& g = dom.grid();
  if (!(u.grid() == g)) throw DomainError("field lives on a different grid");
  std::vector<Vec2> out;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (dom.in_omega0(k) && u[k] <= t) out.push_back(g.point(k));

  auto edge = [&](std::size_t a, std::size_t b) {
    if (!dom.in_omega0(a) || !dom.in_omega0(b)) return;
    const double fa = u[a] - t;
    const double fb = u[b] - t;
    if (!((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0))) return;
    const double s = fa / (fa - fb);
    out.push_back(g.point(a) + s * (g.point(b) - g.point(a)));
  };
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (i + 1 < g.nx) edge(g.index(i, j), g.index(i + 1, j));
      if (j + 1 < g.ny) edge(g.index(i, j), g.index(i, j + 1));
    }
  return out;
}

double directed_hausdorff(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  if (a.empty() || b.empty()) throw DomainError("Hausdorff distance needs nonempty sets");
  const PointIndex index(b);
  double worst = 0.0;
  for (const Vec2& p : a) worst = std::max(worst, index.nearest_distance(p));
  return worst;
}

double hausdorff(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

double compare_distance_fields(const DistanceField& df, const std::vector<Vec2>& K, const Domain& dom) {
  if (K.empty()) throw DomainError("reference set is empty");
  const ScalarField d = distance_to_set(K, dom);
  double worst = 0.0;
  for (std::size_t k = 0; k < dom.grid().size(); ++k)
    if (dom.in_omega0(k)) worst = std::max(worst, std::abs(df.values[k] - d[k]));
  return worst;
}

double far_field_deviation(const ScalarField& u, const std::vector<Vec2>& K, double min_dist, const Domain& dom) {
  const ScalarField d = distance_to_set(K, dom);
  double worst = 0.0;
  for (std::size_t k = 0; k < dom.grid().size(); ++k)
    if (dom.in_omega0(k) && d[k] >= min_dist) worst = std::max(worst, std::abs(1.0 - u[k]));
  return worst;
}

DiscreteMeasure quantize_measure(const std::vector<MassSample>& samples, int k, Vec2 base_point,
                                 const ConvexPolygon& poly) {
  if (k < 0 || k > 40) throw ParameterError("dyadic level out of range");
  const double scale = std::ldexp(1.0, k);
  const double side = 1.0 / scale;

  struct Bin {
    double mass = 0.0;
    Vec2 moment;
    Vec2 first;
    int count = 0;
  };
  std::map<std::pair<long long, long long>, Bin> bins;
  double total = 0.0;
  for (const MassSample& s : samples) {
    if (!(s.mass >= 0.0) || !std::isfinite(s.mass)) throw DomainError("sample masses must be nonnegative");
    if (s.mass == 0.0) continue;
    const auto key = std::make_pair(static_cast<long long>(std::floor(s.point.x * scale)),
                                    static_cast<long long>(std::floor(s.point.y * scale)));
    Bin& b = bins[key];
    b.mass += s.mass;
    b.moment = b.moment + s.mass * s.point;
    if (b.count++ == 0) b.first = s.point;
    total += s.mass;
  }
  if (!(total > 0.0)) throw DomainError("measure has zero total mass");

  std::vector<Atom> atoms;
  atoms.reserve(bins.size());
  for (const auto& [key, b] : bins) {
    const Vec2 lo{static_cast<double>(key.first) * side, static_cast<double>(key.second) * side};
    Vec2 p = b.count == 1 ? b.first : (1.0 / b.mass) * b.moment;
    // keep the representative in the half-open square
    const double hi_x = std::nextafter(lo.x + side, lo.x);
    const double hi_y = std::nextafter(lo.y + side, lo.y);
    p = {std::clamp(p.x, lo.x, hi_x), std::clamp(p.y, lo.y, hi_y)};
    if (!point_in_omega0(p, poly)) {
      const Vec2 q = project_to_polygon(p, poly);
      if (std::floor(q.x * scale) == static_cast<double>(key.first) &&
          std::floor(q.y * scale) == static_cast<double>(key.second))
        p = q;
    }
    atoms.push_back({p, b.mass});
  }
  return DiscreteMeasure(std::move(atoms), base_point, poly);
}

double divergence_arclength(const Polyline& a, const Polyline& b, double tol) {
  const auto& pts = a.points();
  for (std::size_t m = 0; m < pts.size(); ++m) {
    if (project_to_polyline(pts[m], b).dist > tol) return m == 0 ? 0.0 : a.cumulative()[m - 1];
  }
  return a.length();
}

std::vector<Vec2> junction_candidates(const CurveBundle& bundle, double tol, double min_offset) {
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < bundle.size(); ++i)
    for (std::size_t j = i + 1; j < bundle.size(); ++j) {
      const Polyline& a = bundle.curves[i];
      const Polyline& b = bundle.curves[j];
      if (a.length() <= 0.0 || b.length() <= 0.0) continue;
      const double s = divergence_arclength(a, b, tol);
      if (s < min_offset || s > a.length() - min_offset) continue;
      const Vec2 J = a.at_arclength(s);
      if (distance(J, b.back()) < min_offset) continue;
      out.push_back(J);
    }
  return out;
}

std::vector<Vec2> cluster_points(const std::vector<Vec2>& pts, double radius) {
  const std::size_t n = pts.size();
  std::vector<std::size_t> parent(n);
  for (std::size_t k = 0; k < n; ++k) parent[k] = k;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (distance(pts[i], pts[j]) <= radius) parent[find(i)] = find(j);

  std::map<std::size_t, std::pair<Vec2, int>> sums;
  for (std::size_t k = 0; k < n; ++k) {
    auto& [s, c] = sums[find(k)];
    s = s + pts[k];
    ++c;
  }
  std::vector<Vec2> out;
  for (const auto& [root, sc] : sums) out.push_back((1.0 / sc.second) * sc.first);
  return out;
}

JunctionAngles branch_angles(const Polyline& a, const Polyline& b, double tol, double arm) {
  const double s = divergence_arclength(a, b, tol);
  JunctionAngles out;
  out.point = a.at_arclength(s);
  const double sb = project_to_polyline(out.point, b).arclength;
  const std::array<Vec2, 3> ends = {a.at_arclength(std::max(s - arm, 0.0)),
                                    a.at_arclength(std::min(s + arm, a.length())),
                                    b.at_arclength(std::min(sb + arm, b.length()))};
  std::vector<double> dirs;
  for (const Vec2& e : ends) {
    const Vec2 d = e - out.point;
    if (norm(d) > 0.0) dirs.push_back(std::atan2(d.y, d.x));
  }
  std::sort(dirs.begin(), dirs.end());
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    double gap = (k + 1 < dirs.size() ? dirs[k + 1] : dirs.front() + 2.0 * std::numbers::pi) - dirs[k];
    out.angles.push_back(gap * 180.0 / std::numbers::pi);
  }
  return out;
}

}  // namespace steiner
