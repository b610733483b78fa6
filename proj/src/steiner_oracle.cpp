#include "steiner/steiner_oracle.hpp"

#include <array>
#include <limits>
#include <numbers>

namespace steiner {

namespace {

constexpr double kWideAngle = 2.0 * std::numbers::pi / 3.0;

double angle_at(Vec2 v, Vec2 p, Vec2 q) {
  const Vec2 a = p - v;
  const Vec2 b = q - v;
  return std::atan2(std::abs(cross(a, b)), dot(a, b));
}

// Apex of the equilateral triangle on [p, q] lying on the opposite side of
// the line pq from `away`.
Vec2 equilateral_apex(Vec2 p, Vec2 q, Vec2 away) {
  const Vec2 m = 0.5 * (p + q);
  const Vec2 d = q - p;
  Vec2 n{-d.y, d.x};
  if (dot(n, away - m) > 0.0) n = -1.0 * n;
  return m + (std::sqrt(3.0) / 2.0) * n;
}

bool intersect_lines(Vec2 p, Vec2 dp, Vec2 q, Vec2 dq, Vec2& out) {
  const double den = cross(dp, dq);
  if (std::abs(den) < 1e-300) return false;
  const double s = cross(q - p, dq) / den;
  out = p + s * dp;
  return true;
}

// Newton iteration for a sum of distances over `free` unknown points that
// are joined to fixed points and to each other. Edges reference unknowns by
// index >= 0 and fixed points by ~index.
struct DistanceSum {
  std::vector<Vec2> fixed;
  std::vector<std::pair<int, int>> edges;

  Vec2 endpoint(int id, const std::vector<Vec2>& x) const {
    return id >= 0 ? x[static_cast<std::size_t>(id)] : fixed[static_cast<std::size_t>(~id)];
  }

  double value(const std::vector<Vec2>& x) const {
    double s = 0.0;
    for (auto [a, b] : edges) s += distance(endpoint(a, x), endpoint(b, x));
    return s;
  }

  // Returns the final gradient norm.
  double minimize(std::vector<Vec2>& x, int max_iter = 200) const {
    const std::size_t n = 2 * x.size();
    double gnorm = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
      std::vector<double> g(n, 0.0);
      std::vector<double> H(n * n, 0.0);
      bool singular = false;
      for (auto [a, b] : edges) {
        const Vec2 pa = endpoint(a, x);
        const Vec2 pb = endpoint(b, x);
        const double len = distance(pa, pb);
        if (len < 1e-14) {
          singular = true;
          continue;
        }
        const Vec2 u = (1.0 / len) * (pa - pb);
        const std::array<double, 4> h = {(1 - u.x * u.x) / len, -u.x * u.y / len, -u.x * u.y / len,
                                         (1 - u.y * u.y) / len};
        auto add = [&](int r, int c, double sign) {
          if (r < 0 || c < 0) return;
          for (int p = 0; p < 2; ++p)
            for (int q = 0; q < 2; ++q) H[(2 * r + p) * n + 2 * c + q] += sign * h[2 * p + q];
        };
        if (a >= 0) {
          g[2 * a] += u.x;
          g[2 * a + 1] += u.y;
        }
        if (b >= 0) {
          g[2 * b] -= u.x;
          g[2 * b + 1] -= u.y;
        }
        add(a, a, 1.0);
        add(b, b, 1.0);
        add(a, b, -1.0);
        add(b, a, -1.0);
      }
      gnorm = 0.0;
      for (double v : g) gnorm += v * v;
      gnorm = std::sqrt(gnorm);
      if (gnorm <= 1e-13 || singular) return gnorm;

      // Gaussian elimination with partial pivoting on H d = -g
      std::vector<double> d(n);
      std::vector<double> A = H;
      std::vector<double> rhs(n);
      for (std::size_t k = 0; k < n; ++k) rhs[k] = -g[k];
      bool ok = true;
      for (std::size_t c = 0; c < n && ok; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
          if (std::abs(A[r * n + c]) > std::abs(A[piv * n + c])) piv = r;
        if (std::abs(A[piv * n + c]) < 1e-300) {
          ok = false;
          break;
        }
        if (piv != c) {
          for (std::size_t k = 0; k < n; ++k) std::swap(A[c * n + k], A[piv * n + k]);
          std::swap(rhs[c], rhs[piv]);
        }
        for (std::size_t r = c + 1; r < n; ++r) {
          const double f = A[r * n + c] / A[c * n + c];
          for (std::size_t k = c; k < n; ++k) A[r * n + k] -= f * A[c * n + k];
          rhs[r] -= f * rhs[c];
        }
      }
      if (!ok) return gnorm;
      for (std::size_t c = n; c-- > 0;) {
        double s = rhs[c];
        for (std::size_t k = c + 1; k < n; ++k) s -= A[c * n + k] * d[k];
        d[c] = s / A[c * n + c];
      }
      // backtracking keeps the iteration monotone
      const double f0 = value(x);
      double t = 1.0;
      std::vector<Vec2> trial = x;
      for (int ls = 0; ls < 60; ++ls) {
        for (std::size_t k = 0; k < x.size(); ++k) trial[k] = x[k] + t * Vec2{d[2 * k], d[2 * k + 1]};
        if (value(trial) <= f0) break;
        t *= 0.5;
      }
      if (trial == x) return gnorm;
      x = trial;
    }
    return gnorm;
  }
};

struct Candidate {
  std::vector<Vec2> steiner;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // over terminals + steiner
  double length = std::numeric_limits<double>::infinity();
};

double edges_length(const std::vector<Vec2>& nodes, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  double s = 0.0;
  for (auto [a, b] : edges) s += distance(nodes[a], nodes[b]);
  return s;
}

// Decodes a Pruefer sequence of length n-2 into n-1 edges.
std::vector<std::pair<std::size_t, std::size_t>> pruefer_edges(const std::vector<std::size_t>& seq, std::size_t n) {
  std::vector<std::size_t> degree(n, 1);
  for (std::size_t v : seq) ++degree[v];
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t v : seq) {
    for (std::size_t leaf = 0; leaf < n; ++leaf) {
      if (degree[leaf] == 1) {
        edges.emplace_back(std::min(leaf, v), std::max(leaf, v));
        --degree[leaf];
        --degree[v];
        break;
      }
    }
  }
  std::size_t u = n, w = n;
  for (std::size_t v = 0; v < n; ++v)
    if (degree[v] == 1) (u == n ? u : w) = v;
  edges.emplace_back(u, w);
  return edges;
}

void consider(Candidate& best, Candidate c, const std::vector<Vec2>& terminals) {
  std::vector<Vec2> nodes = terminals;
  nodes.insert(nodes.end(), c.steiner.begin(), c.steiner.end());
  c.length = edges_length(nodes, c.edges);
  // prefer fewer Steiner points on ties
  if (!std::isfinite(best.length)) {
    best = std::move(c);
    return;
  }
  const double slack = 1e-12 * (1.0 + best.length);
  if (c.length < best.length - slack ||
      (std::abs(c.length - best.length) <= slack && c.steiner.size() < best.steiner.size()))
    best = std::move(c);
}

// Melzak start for the full topology {a,b}-S1-S2-{c,d}, refined by Newton.
// Returns false unless both Steiner points are proper 120-degree junctions.
bool full_topology(Vec2 a, Vec2 b, Vec2 c, Vec2 d, Vec2& s1, Vec2& s2) {
  const Vec2 e1 = equilateral_apex(a, b, 0.5 * (c + d));
  const Vec2 e2 = equilateral_apex(c, d, 0.5 * (a + b));
  const double scale = std::max({distance(a, b), distance(c, d), distance(a, c), 1e-300});

  // S1 is the second intersection of line e2->e1 with the circle through
  // a, b, e1 (centered at the triangle centroid), likewise for S2.
  auto second_hit = [](Vec2 from, Vec2 apex, Vec2 p, Vec2 q, Vec2& out) {
    const Vec2 center = (1.0 / 3.0) * (p + q + apex);
    const double R = distance(center, apex);
    const Vec2 dir = apex - from;
    const double L2 = dot(dir, dir);
    if (L2 <= 0.0) return false;
    // points from + t dir on the circle; t = 1 is the apex
    const Vec2 f = from - center;
    const double B = dot(f, dir);
    const double C = dot(f, f) - R * R;
    // product of roots is C / L2 and one root is 1
    const double t = C / L2;
    (void)B;
    out = from + t * dir;
    return t > 0.0 && t < 1.0;
  };
  Vec2 m1{}, m2{};
  const bool melzak_ok = second_hit(e2, e1, a, b, m1) && second_hit(e1, e2, c, d, m2);
  std::vector<Vec2> x = melzak_ok ? std::vector<Vec2>{m1, m2} : std::vector<Vec2>{0.5 * (a + b), 0.5 * (c + d)};

  DistanceSum f;
  f.fixed = {a, b, c, d};
  f.edges = {{0, ~0}, {0, ~1}, {0, 1}, {1, ~2}, {1, ~3}};
  f.minimize(x);
  s1 = x[0];
  s2 = x[1];

  const double tol = 1e-9 * scale;
  if (distance(s1, s2) < tol) return false;
  for (Vec2 t : {a, b, c, d})
    if (distance(s1, t) < tol || distance(s2, t) < tol) return false;
  const double ang = 1e-7;
  auto proper = [&](Vec2 s, Vec2 p, Vec2 q, Vec2 r) {
    return std::abs(angle_at(s, p, q) - kWideAngle) < ang && std::abs(angle_at(s, q, r) - kWideAngle) < ang &&
           std::abs(angle_at(s, r, p) - kWideAngle) < ang;
  };
  return proper(s1, a, b, s2) && proper(s2, c, d, s1);
}

}  // namespace

FermatResult fermat_point(Vec2 a, Vec2 b, Vec2 c) {
  const std::array<Vec2, 3> p = {a, b, c};
  // coincident points: the shared point is optimal
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (p[i] == p[j]) {
        const Vec2 o = p[3 - i - j];
        return {p[i], distance(p[i], o)};
      }
  for (int i = 0; i < 3; ++i) {
    const Vec2 v = p[i];
    const Vec2 q = p[(i + 1) % 3];
    const Vec2 r = p[(i + 2) % 3];
    if (angle_at(v, q, r) >= kWideAngle - 1e-12) return {v, distance(v, q) + distance(v, r)};
  }
  // Torricelli construction: lines from each vertex to the apex of the
  // outer equilateral triangle on the opposite side meet at the point.
  const Vec2 ap = equilateral_apex(b, c, a);
  const Vec2 bp = equilateral_apex(c, a, b);
  Vec2 x = (1.0 / 3.0) * (a + b + c);
  Vec2 hit{};
  if (intersect_lines(a, ap - a, b, bp - b, hit)) x = hit;

  DistanceSum f;
  f.fixed = {a, b, c};
  f.edges = {{0, ~0}, {0, ~1}, {0, ~2}};
  std::vector<Vec2> xs{x};
  f.minimize(xs);
  return {xs[0], f.value(xs)};
}

double mst_length(const std::vector<Vec2>& pts) {
  if (pts.size() < 2) throw ParameterError("spanning tree needs at least 2 points");
  const std::size_t n = pts.size();
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<char> in(n, 0);
  best[0] = 0.0;
  double total = 0.0;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t v = n;
    for (std::size_t k = 0; k < n; ++k)
      if (!in[k] && (v == n || best[k] < best[v])) v = k;
    in[v] = 1;
    total += best[v];
    for (std::size_t k = 0; k < n; ++k)
      if (!in[k]) best[k] = std::min(best[k], distance(pts[v], pts[k]));
  }
  return total;
}

SteinerTree exact_steiner(const std::vector<Vec2>& terminals) {
  const std::size_t n = terminals.size();
  if (n < 2 || n > 4) throw ParameterError("exact Steiner trees are available for 2 to 4 terminals");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (terminals[i] == terminals[j]) throw ParameterError("terminals must be distinct");

  Candidate best;
  if (n == 2) {
    consider(best, {{}, {{0, 1}}}, terminals);
  } else if (n == 3) {
    const FermatResult fr = fermat_point(terminals[0], terminals[1], terminals[2]);
    std::size_t hub = 3;
    for (std::size_t k = 0; k < 3; ++k)
      if (distance(fr.point, terminals[k]) <= 1e-12 * (1.0 + norm(terminals[k]))) hub = k;
    if (hub == 3) {
      consider(best, {{fr.point}, {{0, 3}, {1, 3}, {2, 3}}}, terminals);
    } else {
      Candidate c;
      for (std::size_t k = 0; k < 3; ++k)
        if (k != hub) c.edges.emplace_back(std::min(hub, k), std::max(hub, k));
      consider(best, std::move(c), terminals);
    }
  } else {
    // all 16 labelled spanning trees
    for (std::size_t s0 = 0; s0 < 4; ++s0)
      for (std::size_t s1 = 0; s1 < 4; ++s1) consider(best, {{}, pruefer_edges({s0, s1}, 4)}, terminals);
    // Fermat tree on three terminals, fourth joined to one of its nodes
    for (std::size_t out = 0; out < 4; ++out) {
      std::array<std::size_t, 3> tri{};
      std::size_t m = 0;
      for (std::size_t k = 0; k < 4; ++k)
        if (k != out) tri[m++] = k;
      const SteinerTree sub = exact_steiner({terminals[tri[0]], terminals[tri[1]], terminals[tri[2]]});
      const bool has_point = sub.nodes.size() == 4;
      auto map_node = [&](std::size_t v) { return v < 3 ? tri[v] : std::size_t{4}; };
      for (std::size_t attach = 0; attach < (has_point ? 4u : 3u); ++attach) {
        Candidate c;
        if (has_point) c.steiner.push_back(sub.nodes[3]);
        for (auto [u, v] : sub.edges) c.edges.emplace_back(map_node(u), map_node(v));
        c.edges.emplace_back(map_node(attach), out);
        consider(best, std::move(c), terminals);
      }
    }
    // the three full topologies
    const std::array<std::array<std::size_t, 4>, 3> pairings = {{{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}}};
    for (const auto& pr : pairings) {
      Vec2 s1{}, s2{};
      if (full_topology(terminals[pr[0]], terminals[pr[1]], terminals[pr[2]], terminals[pr[3]], s1, s2)) {
        consider(best, {{s1, s2}, {{pr[0], 4}, {pr[1], 4}, {4, 5}, {pr[2], 5}, {pr[3], 5}}}, terminals);
      }
    }
  }

  SteinerTree tree;
  tree.terminal_count = n;
  tree.nodes = terminals;
  tree.nodes.insert(tree.nodes.end(), best.steiner.begin(), best.steiner.end());
  tree.edges = best.edges;
  tree.length = best.length;
  return tree;
}

std::vector<Vec2> sample_tree(const SteinerTree& tree, double spacing) {
  std::vector<Vec2> out;
  for (auto [a, b] : tree.edges) {
    const Vec2 p = tree.nodes[a];
    const Vec2 q = tree.nodes[b];
    const int m = std::max(1, static_cast<int>(std::ceil(distance(p, q) / spacing)));
    for (int k = 0; k <= m; ++k) out.push_back(p + (static_cast<double>(k) / m) * (q - p));
  }
  if (out.empty()) out = tree.nodes;
  return out;
}

nlohmann::ordered_json tree_json(const SteinerTree& tree) {
  nlohmann::ordered_json j;
  auto nodes = nlohmann::ordered_json::array();
  for (const Vec2& p : tree.nodes) nodes.push_back({p.x, p.y});
  auto edges = nlohmann::ordered_json::array();
  for (auto [a, b] : tree.edges) edges.push_back({a, b});
  j["nodes"] = std::move(nodes);
  j["edges"] = std::move(edges);
  j["length"] = tree.length;
  return j;
}

}  // namespace steiner
