#include <doctest.h>

#include <cmath>
#include <sstream>

#include "steiner/curves.hpp"
#include "steiner/elliptic.hpp"
#include "steiner/geodesic.hpp"
#include "steiner/optimizer.hpp"
#include "support.hpp"

using namespace steiner;

namespace {

DiscreteMeasure measure(Vec2 base, const std::vector<Atom>& atoms) {
  return DiscreteMeasure(atoms, base, fixture::unit_square());
}

double point_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 e = b - a;
  return distance(p, a + std::clamp(dot(p - a, e) / dot(e, e), 0.0, 1.0) * e);
}

// Random lattice walk between two nodes, one axis or diagonal step at a
// time, biased towards the target.
Polyline random_walk(const Grid& g, const Domain& dom, std::size_t from, std::size_t to) {
  int i = g.col(from), j = g.row(from);
  const int ti = g.col(to), tj = g.row(to);
  std::vector<Vec2> pts{g.point(from)};
  while (i != ti || j != tj) {
    int di = (ti > i) - (ti < i);
    int dj = (tj > j) - (tj < j);
    if (fixture::uniform(0, 1) < 0.3) {
      const int ni = i + (fixture::uniform(0, 1) < 0.5 ? 1 : -1);
      if (dom.in_omega0(g.index(std::clamp(ni, 0, g.nx - 1), j))) di = ni - i, dj = 0;
    }
    i = std::clamp(i + di, 0, g.nx - 1);
    j = std::clamp(j + dj, 0, g.ny - 1);
    if (!dom.in_omega0(g.index(i, j))) {
      i -= di;
      j -= dj;
      i += (ti > i) - (ti < i);
      j += (tj > j) - (tj < j);
    }
    pts.push_back(g.point(i, j));
  }
  return Polyline(pts);
}

}  // namespace

TEST_CASE("energy of simple configurations") {
  const Domain dom = fixture::square_domain(33);
  const Grid& g = dom.grid();
  const Params p = make_params(0.1, 1.5, 0.1);
  const DiscreteMeasure mu = measure({0.1, 0.1}, {{{0.9, 0.1}, 0.25}, {{0.4, 0.9}, 0.5}});
  const ScalarField one = ScalarField::constant(g, 1.0);

  const EnergyBreakdown e = energy(one, straight_bundle(mu), mu, p, dom);
  CHECK(e.diffuse == 0.0);
  const double expected = (0.25 * 0.8 + 0.5 * std::hypot(0.3, 0.8)) * (1.0 + p.delta) / p.lambda;
  CHECK(e.geodesic == doctest::Approx(expected).epsilon(1e-12));
  CHECK(e.total == e.diffuse + e.geodesic);

  const DiscreteMeasure degenerate = measure({0.4, 0.4}, {{{0.4, 0.4}, 0.5}});
  CHECK(energy(one, straight_bundle(degenerate), degenerate, p, dom).total == 0.0);

  CurveBundle wrong = straight_bundle(mu);
  wrong.curves.pop_back();
  CHECK_THROWS_AS(energy(one, wrong, mu, p, dom), DomainError);
}

TEST_CASE("energy dominates the geodesic estimate on lattice curves") {
  const Domain dom = fixture::square_domain(33);
  const Grid& g = dom.grid();
  const Params p = make_params(0.1, 1.5, 0.1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v(g.size());
    for (double& x : v) x = fixture::uniform(0.0, 1.0);
    const ScalarField u(g, v);
    const ScalarField w = metric_field(u, p);
    const std::size_t src = dom.nearest_omega0_node(fixture::random_point());
    const std::size_t dst = dom.nearest_omega0_node(fixture::random_point());
    if (src == dst) continue;
    const DiscreteMeasure mu = measure(g.point(src), {{g.point(dst), 0.5}});
    const CurveBundle b{{random_walk(g, dom, src, dst)}};
    const DistanceField df = distance_field(w, g.point(src), dom);
    const double f_estimate = diffuse_energy(u, p, dom) + 0.5 * df.at(dst) / p.lambda;
    // along an axis or diagonal edge the trapezoid rule differs from the
    // edge average only by the bilinear cross term
    CHECK(energy(u, b, mu, p, dom).total >= f_estimate * (1.0 - 1e-2));
  }
}

TEST_CASE("best curves") {
  const Domain dom = fixture::square_domain(65);
  const Grid& g = dom.grid();
  const Params p = make_params(0.05, 1.5, 0.05);

  SUBCASE("u = 1 gives near-straight curves") {
    const DiscreteMeasure mu = measure({0.1, 0.2}, {{{0.9, 0.7}, 0.5}, {{0.1, 0.2}, 0.5}});
    const CurveBundle b = best_curves(ScalarField::constant(g, 1.0), mu, p, dom);
    CHECK_NOTHROW(check_bundle(b, mu));
    const double straight = distance({0.1, 0.2}, {0.9, 0.7});
    CHECK(b.curves[0].length() <= 1.03 * straight + 2.0 * g.hx);
    for (const Vec2& q : b.curves[0].points()) CHECK(point_segment(q, {0.1, 0.2}, {0.9, 0.7}) <= 0.1);
    CHECK(b.curves[1].length() == 0.0);
    // resampling is equidistant in arc length of the path, so chords never exceed the spacing
    const Polyline path = shortest_path(distance_field(metric_field(ScalarField::constant(g, 1.0), p), {0.1, 0.2}, dom),
                                        {0.9, 0.7}, dom);
    const double spacing = path.length() / (b.curves[0].size() - 1);
    CHECK(spacing <= 0.5 * g.hmin() + 1e-12);
    for (std::size_t k = 0; k + 1 < b.curves[0].size(); ++k) CHECK(b.curves[0].segment_length(k) <= spacing + 1e-12);
  }

  SUBCASE("curves follow a valley") {
    // u vanishes on an L-shaped valley from (0.1,0.1) via (0.9,0.1) to (0.9,0.9)
    std::vector<double> v(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
      const Vec2 x = g.point(k);
      const double d = std::min(point_segment(x, {0.1, 0.1}, {0.9, 0.1}), point_segment(x, {0.9, 0.1}, {0.9, 0.9}));
      v[k] = d < 0.03 ? 0.0 : 1.0;
    }
    const ScalarField u(g, v);
    const DiscreteMeasure mu = measure({0.1, 0.1}, {{{0.9, 0.9}, 1.0}});
    const CurveBundle b = best_curves(u, mu, p, dom);
    const ScalarField w = metric_field(u, p);
    const double along = path_integral(w, b.curves[0]);
    const double chord = path_integral(w, Polyline({{0.1, 0.1}, {0.9, 0.9}}));
    CHECK(along < chord);
    CHECK(along <= p.delta * 1.6 * 1.1 + 0.05);
    CHECK(b.curves[0].length() >= 1.5);
  }

  SUBCASE("geodesic term is below random lattice paths") {
    // smooth random field: a few random Fourier modes mapped into [0,1]
    std::vector<double> v(g.size(), 0.0);
    for (int m = 0; m < 6; ++m) {
      const double kx = fixture::uniform(-8, 8), ky = fixture::uniform(-8, 8), ph = fixture::uniform(0, 6.3);
      for (std::size_t k = 0; k < g.size(); ++k) v[k] += std::sin(kx * g.point(k).x + ky * g.point(k).y + ph) / 12.0;
    }
    for (double& x : v) x += 0.5;
    const ScalarField u(g, v);
    const ScalarField w = metric_field(u, p);
    const DiscreteMeasure mu = measure({0.2, 0.2}, {{{0.8, 0.7}, 1.0}});
    const CurveBundle b = best_curves(u, mu, p, dom);
    const double best = path_integral(w, b.curves[0]);
    const std::size_t src = dom.nearest_omega0_node({0.2, 0.2});
    const std::size_t dst = dom.nearest_omega0_node({0.8, 0.7});
    const DistanceField df = distance_field(w, {0.2, 0.2}, dom);
    CHECK(best == doctest::Approx(df.at(dst)).epsilon(0.1));
    for (int t = 0; t < 30; ++t) CHECK(best <= 1.05 * path_integral(w, random_walk(g, dom, src, dst)));
  }
}

TEST_CASE("alternate on a degenerate measure") {
  const Domain dom = fixture::square_domain(33);
  const DiscreteMeasure mu = measure({0.5, 0.5}, {{{0.5, 0.5}, 0.5}});
  const SolveTrace t = alternate(mu, make_params(0.1, 1.5, 0.1), dom, straight_bundle(mu), {});
  CHECK(t.converged);
  CHECK(t.iterations.size() <= 2);
  CHECK(t.iterations.back().total == 0.0);
  for (double v : t.u->values()) CHECK(v == 1.0);
}

TEST_CASE("alternate recovers a segment between two terminals") {
  const Domain dom = fixture::square_domain(129);
  const Grid& g = dom.grid();
  const double eps = 0.04;
  const Params p = make_params(eps, 1.5, eps);
  const DiscreteMeasure mu = measure({0.0, 0.5}, {{{1.0, 0.5}, 0.5}});
  const SolveTrace t = alternate(mu, p, dom, straight_bundle(mu), {});
  CHECK(t.converged);
  CHECK(max_relative_increase(t) <= 1e-8);
  for (const Vec2& q : t.bundle.curves[0].points()) CHECK(std::abs(q.y - 0.5) <= 2.0 * g.hy);
  // energy per unit length of the one-dimensional optimal profile
  const double beta = 0.5;
  const double per_length = beta / (eps + beta) + beta * p.delta / eps;
  CHECK(t.iterations.back().total == doctest::Approx(per_length).epsilon(0.12));
  for (double v : t.u->values()) {
    CHECK(v >= -1e-9);
    CHECK(v <= 1.0 + 1e-9);
  }
  // every recorded bundle satisfies the Ahlfors bound
  for (const Polyline& c : t.bundle.curves)
    CHECK(ahlfors_scan(c, scan_radii(c, g.hmin())).worst_ratio < p.lambda_cap);
}

TEST_CASE("continuation") {
  const Domain dom = fixture::square_domain(65);
  const DiscreteMeasure mu = measure({0.1, 0.2}, {{{0.9, 0.2}, 1.0 / 3}, {{0.5, 0.85}, 1.0 / 3}});

  SUBCASE("one rung reduces to alternate") {
    const std::vector<SolveTrace> c = continuation(mu, dom, {{0.1, 0.1}}, 1.5, {});
    const SolveTrace a = alternate(mu, make_params(0.1, 1.5, 0.1), dom, straight_bundle(mu), {});
    REQUIRE(c.size() == 1);
    REQUIRE(c[0].iterations.size() == a.iterations.size());
    for (std::size_t k = 0; k < a.iterations.size(); ++k) CHECK(c[0].iterations[k].total == a.iterations[k].total);
  }
  SUBCASE("schedule validation") {
    CHECK_THROWS_AS(continuation(mu, dom, {}, 1.5, {}), ParameterError);
    CHECK_THROWS_AS(continuation(mu, dom, {{0.1, 0.1}, {0.1, 0.05}}, 1.5, {}), ParameterError);
    CHECK_THROWS_AS(continuation(mu, dom, {{0.1, 0.1}, {0.2, 0.05}}, 1.5, {}), ParameterError);
    CHECK_THROWS_AS(continuation(mu, dom, {{0.1, 1.5}}, 1.5, {}), ParameterError);
    CHECK_THROWS_AS(continuation(mu, dom, {{0.1, 0.1}}, 2.0, {}), ParameterError);
  }
  SUBCASE("warm start does not lose to a cold start") {
    const std::vector<SolveTrace> c = continuation(mu, dom, {{0.12, 0.12}, {0.08, 0.08}}, 1.5, {});
    REQUIRE(c.size() == 2);
    const SolveTrace cold = alternate(mu, c[1].params, dom, straight_bundle(mu), {});
    const double slack = 1e-3 * cold.iterations.front().total;
    CHECK(c[1].iterations.front().total <= cold.iterations.front().total + slack);
    for (const SolveTrace& t : c) CHECK(max_relative_increase(t) <= 1e-8);
  }
  SUBCASE("restarts keep the best run") {
    ContinuationOptions opts;
    opts.restarts = 2;
    opts.seed = 7;
    const std::vector<SolveTrace> r = continuation(mu, dom, {{0.1, 0.1}}, 1.5, opts);
    const std::vector<SolveTrace> plain = continuation(mu, dom, {{0.1, 0.1}}, 1.5, {});
    CHECK(r[0].iterations.back().total <= plain[0].iterations.back().total);
    const std::vector<SolveTrace> again = continuation(mu, dom, {{0.1, 0.1}}, 1.5, opts);
    CHECK(again[0].iterations.back().total == r[0].iterations.back().total);
  }
}

TEST_CASE("relabelling terminals leaves the energy unchanged") {
  const Domain dom = fixture::square_domain(65);
  const Params p = make_params(0.08, 1.5, 0.08);
  const Vec2 a0{0.0, 0.1}, a1{1.0, 0.1}, a2{0.5, 0.1 + std::sqrt(3.0) / 2.0};
  const DiscreteMeasure m1 = measure(a0, {{a1, 1.0 / 3}, {a2, 1.0 / 3}});
  const DiscreteMeasure m2 = measure(a0, {{a2, 1.0 / 3}, {a1, 1.0 / 3}});
  const SolveTrace t1 = alternate(m1, p, dom, straight_bundle(m1), {});
  const SolveTrace t2 = alternate(m2, p, dom, straight_bundle(m2), {});
  const double e1 = t1.iterations.back().total;
  CHECK(std::abs(e1 - t2.iterations.back().total) <= 1e-8 * e1);
}

TEST_CASE("chained initial bundles") {
  const DiscreteMeasure mu = measure({0, 0}, {{{1, 0}, 0.2}, {{1, 1}, 0.2}, {{0, 1}, 0.2}});
  const CurveBundle b = chained_bundle(mu, {2, 0, 1});
  CHECK_NOTHROW(check_bundle(b, mu));
  CHECK(b.curves[2].size() == 2);
  CHECK(b.curves[0].points() == std::vector<Vec2>{{0, 0}, {0, 1}, {1, 0}});
  CHECK(b.curves[1].length() == doctest::Approx(1.0 + std::sqrt(2.0) + 1.0));
}

TEST_CASE("trace serialization") {
  SolveTrace t;
  t.params = make_params(0.1, 1.5, 0.1);
  t.iterations = {{1, 3.0, 1.0, 2.0, 1.5, 0, 40, true}, {2, 2.5, 1.0, 1.5, 1.4, 1, 30, false}};
  t.bundle.curves = {Polyline({{0, 0}, {0.5, 0.25}})};
  t.converged = true;
  const auto j = trace_json(t, "field_r0.txt");
  CHECK(j["params"]["epsilon"] == 0.1);
  CHECK(j["params"]["lambda_cap"].get<double>() == doctest::Approx(t.params.lambda_cap));
  REQUIRE(j["iterations"].size() == 2);
  for (const char* key : {"k", "total", "diffuse", "geodesic", "length", "replacements", "cg_iters"})
    CHECK(j["iterations"][0].contains(key));
  CHECK(j["iterations"][1]["total"] == 2.5);
  CHECK(j["final"]["field_ref"] == "field_r0.txt");
  CHECK(j["final"]["curves"][0][1][0] == 0.5);

  std::ostringstream os;
  write_trace_csv(os, {t, t});
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line.rfind("rung,epsilon,lambda,k,total", 0) == 0);
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 4);

  CHECK(max_relative_increase(t) == 0.0);
  t.iterations[1].total = 3.5;
  CHECK(max_relative_increase(t) == doctest::Approx(0.5 / 4.0));
}
