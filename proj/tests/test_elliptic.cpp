#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "steiner/elliptic.hpp"
#include "steiner/geodesic.hpp"
#include "support.hpp"

using namespace steiner;

namespace {

DiscreteMeasure measure(Vec2 base, const std::vector<Atom>& atoms) {
  return DiscreteMeasure(atoms, base, fixture::unit_square());
}

std::vector<double> random_vector(std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = fixture::uniform(lo, hi);
  return v;
}

// The quadratic the potential solve minimizes, written out from the
// diffuse part and the lumped curve weights.
double lumped_functional(const ScalarField& u, const std::vector<double>& lumped, const Params& p,
                         const Domain& dom) {
  double curve = 0.0;
  for (std::size_t k = 0; k < lumped.size(); ++k) curve += lumped[k] * u[k] * u[k];
  return diffuse_energy(u, p, dom) + curve / p.lambda;
}

double max_defect(const ScalarField& u) {
  double m = 0.0;
  for (double v : u.values()) m = std::max(m, 1.0 - v);
  return m;
}

}  // namespace

TEST_CASE("curve mass form identities") {
  const Domain dom = fixture::square_domain(65);
  const Grid& g = dom.grid();
  const DiscreteMeasure mu = measure({0.1, 0.2}, {{{0.9, 0.3}, 0.25}, {{0.4, 0.95}, 0.5}, {{0.1, 0.2}, 0.25}});
  CurveBundle b = straight_bundle(mu);
  b.curves[1] = Polyline({{0.1, 0.2}, {0.6, 0.5}, {0.4, 0.95}});
  const CurveMassForm B = curve_mass_form(b, mu, dom);

  double expected = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) expected += mu.atoms()[i].weight * polyline_length(b.curves[i]);
  const std::vector<double> ones(g.size(), 1.0);
  CHECK(std::abs(B.apply(ones, ones) - expected) <= 1e-10 * expected);
  CHECK(B.total_weighted_length == doctest::Approx(expected).epsilon(1e-14));

  SUBCASE("symmetric and positive semidefinite") {
    std::map<std::pair<std::size_t, std::size_t>, double> entries;
    for (const Triplet& t : B.triplets) entries[{t.row, t.col}] = t.value;
    for (const auto& [key, v] : entries) CHECK(entries.at({key.second, key.first}) == v);
    for (int trial = 0; trial < 100; ++trial) {
      const auto x = random_vector(g.size());
      const auto y = random_vector(g.size());
      CHECK(B.apply(x, x) >= -1e-14);
      CHECK(B.apply(x, y) == doctest::Approx(B.apply(y, x)).epsilon(1e-12));
    }
  }

  SUBCASE("rows live next to the curves") {
    for (const Triplet& t : B.triplets) {
      const Vec2 p = g.point(t.row);
      double d = INFINITY;
      for (const Polyline& c : b.curves)
        for (std::size_t k = 0; k + 1 < c.size(); ++k) {
          const Vec2 a = c.points()[k];
          const Vec2 e = c.points()[k + 1] - a;
          const double s = std::clamp(dot(p - a, e) / dot(e, e), 0.0, 1.0);
          d = std::min(d, distance(p, a + s * e));
        }
      CHECK(d <= std::hypot(g.hx, g.hy) + 1e-12);
    }
  }

  SUBCASE("B(u,u) against direct curve quadrature") {
    std::vector<double> v(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) v[k] = std::cos(3.0 * g.point(k).x) * g.point(k).y + 0.2;
    const ScalarField u(g, v);
    double direct = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      double s = 0.0;
      curve_quadrature(b.curves[i], 0.5 * g.hmin(), [&](Vec2 p, double w) { s += w * u.eval(p) * u.eval(p); });
      direct += mu.atoms()[i].weight * s;
    }
    CHECK(B.apply(v, v) == doctest::Approx(direct).epsilon(1e-10));

    // the lumped form integrates the interpolant of u^2 instead
    std::vector<double> sq(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) sq[k] = v[k] * v[k];
    double lumped_direct = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i)
      lumped_direct += mu.atoms()[i].weight * path_integral(ScalarField(g, sq), b.curves[i]);
    const std::vector<double> d = B.lumped();
    double lumped = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) lumped += d[k] * sq[k];
    CHECK(lumped == doctest::Approx(lumped_direct).epsilon(1e-10));
    const std::vector<double> d2 = lumped_curve_weights(b, mu, g);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(d2[k] == doctest::Approx(d[k]).epsilon(1e-12));
  }
}

TEST_CASE("degenerate bundle gives the zero form and u = 1") {
  const Domain dom = fixture::square_domain(33);
  const DiscreteMeasure mu = measure({0.5, 0.5}, {{{0.5, 0.5}, 0.5}});
  const CurveBundle b = straight_bundle(mu);
  CHECK(curve_mass_form(b, mu, dom).total_weighted_length == 0.0);
  for (const Triplet& t : curve_mass_form(b, mu, dom).triplets) CHECK(t.value == 0.0);
  const EllipticSolution sol = solve_potential(b, mu, make_params(0.05, 1.5, 0.05), dom);
  for (double v : sol.u.values()) CHECK(v == 1.0);
}

TEST_CASE("potential bounds, boundary values and maximum principle") {
  const Domain dom = fixture::square_domain(65);
  const Grid& g = dom.grid();
  const Params p = make_params(0.05, 1.5, 0.05);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Atom> atoms;
    for (int k = 0; k < 1 + trial % 3; ++k) atoms.push_back({fixture::random_point(), fixture::uniform(0.1, 1.0)});
    const DiscreteMeasure mu = measure(fixture::random_point(), atoms);
    const EllipticSolution sol = solve_potential(straight_bundle(mu), mu, p, dom);
    CHECK(sol.residual <= 1e-10);
    for (std::size_t k = 0; k < g.size(); ++k) {
      CHECK(sol.u[k] >= -1e-9);
      CHECK(sol.u[k] <= 1.0 + 1e-9);
      if (dom.is_boundary(k)) CHECK(sol.u[k] == 1.0);
    }
  }
}

TEST_CASE("solution minimizes the discrete quadratic") {
  const Domain dom = fixture::square_domain(33);
  const Grid& g = dom.grid();
  const Params p = make_params(0.1, 1.5, 0.1);
  const DiscreteMeasure mu = measure({0.2, 0.3}, {{{0.8, 0.6}, 0.5}, {{0.3, 0.9}, 0.5}});
  const CurveBundle b = straight_bundle(mu);
  const EllipticSolution sol = solve_potential(b, mu, p, dom);
  const std::vector<double> lumped = lumped_curve_weights(b, mu, g);
  const double j0 = lumped_functional(sol.u, lumped, p, dom);
  for (int trial = 0; trial < 40; ++trial) {
    // hat bump on a random interior node patch
    const int ci = 2 + static_cast<int>(fixture::uniform(0, g.nx - 4));
    const int cj = 2 + static_cast<int>(fixture::uniform(0, g.ny - 4));
    for (double t : {1e-3, -1e-3}) {
      std::vector<double> v(sol.u.values().begin(), sol.u.values().end());
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) v[g.index(ci + di, cj + dj)] += t * (di == 0 && dj == 0 ? 1.0 : 0.5);
      CHECK(j0 <= lumped_functional(ScalarField(g, v), lumped, p, dom) + 1e-14);
    }
  }
}

TEST_CASE("mirror-symmetric instance has a mirror-symmetric potential") {
  const Domain dom = fixture::square_domain(65);
  const Grid& g = dom.grid();
  const DiscreteMeasure mu = measure({0.2, 0.5}, {{{0.8, 0.5}, 0.5}});
  const EllipticSolution sol = solve_potential(straight_bundle(mu), mu, make_params(0.05, 1.5, 0.05), dom);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) CHECK(sol.u.at(i, j) == doctest::Approx(sol.u.at(i, g.ny - 1 - j)).epsilon(1e-8));
}

TEST_CASE("warm and cold starts agree") {
  const Domain dom = fixture::square_domain(65);
  const Grid& g = dom.grid();
  const Params p = make_params(0.05, 1.5, 0.05);
  const DiscreteMeasure mu = measure({0.1, 0.1}, {{{0.9, 0.8}, 0.5}, {{0.2, 0.9}, 0.5}});
  const CurveBundle b = straight_bundle(mu);
  const EllipticSolution cold = solve_potential(b, mu, p, dom);
  const ScalarField start(g, random_vector(g.size(), 0.0, 1.0));
  const EllipticSolution warm = solve_potential(b, mu, p, dom, &start);
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(std::abs(cold.u[k] - warm.u[k]) <= 1e-8);
}

TEST_CASE("iteration cap raises SolverError") {
  const Domain dom = fixture::square_domain(65);
  const DiscreteMeasure mu = measure({0.1, 0.1}, {{{0.9, 0.8}, 0.5}});
  try {
    solve_potential(straight_bundle(mu), mu, make_params(0.05, 1.5, 0.05), dom, nullptr, {1e-10, 2});
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(e.iterations == 2);
  }
}

TEST_CASE("smaller curve weight leaves u closer to one") {
  const Domain dom = fixture::square_domain(65);
  const Params p = make_params(0.05, 1.5, 0.05);
  double previous = INFINITY;
  for (double beta : {0.5, 0.1, 0.02, 0.004, 0.0008}) {
    const DiscreteMeasure mu = measure({0.0, 0.5}, {{{0.3, 0.5}, beta}});
    const double d = max_defect(solve_potential(straight_bundle(mu), mu, p, dom).u);
    CHECK(d < previous);
    previous = d;
  }
  CHECK(previous < 0.05);
}

TEST_CASE("exponential decay away from the curves") {
  const Domain dom = fixture::square_domain(257);
  const Grid& g = dom.grid();
  const double eps = 0.025;
  REQUIRE(std::max(g.hx, g.hy) <= eps / 3.0);
  const DiscreteMeasure mu = measure({0.5, 0.05}, {{{0.5, 0.35}, 0.5}, {{0.05, 0.05}, 0.5}});
  const CurveBundle b = straight_bundle(mu);
  const EllipticSolution sol = solve_potential(b, mu, make_params(eps, 1.5, eps), dom);
  int tested = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vec2 x = g.point(k);
    double d = INFINITY;
    for (const Polyline& c : b.curves) {
      const Vec2 a = c.front();
      const Vec2 e = c.back() - a;
      d = std::min(d, distance(x, a + std::clamp(dot(x - a, e) / dot(e, e), 0.0, 1.0) * e));
    }
    if (d < 12.0 * eps) continue;
    CHECK(1.0 - sol.u[k] <= std::exp(-3.0 * d / (32.0 * eps)) + 1e-9);
    ++tested;
  }
  CHECK(tested > 1000);
}

TEST_CASE("diffuse energy") {
  SUBCASE("u = 1") {
    const Domain dom = fixture::square_domain(17);
    CHECK(diffuse_energy(ScalarField::constant(dom.grid(), 1.0), make_params(0.1, 1.5, 0.1), dom) == 0.0);
  }
  SUBCASE("optimal one-dimensional profile costs one per unit length") {
    const Domain dom = fixture::square_domain(513);
    const Grid& g = dom.grid();
    const double eps = 0.04;
    std::vector<double> v(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) v[k] = 1.0 - std::exp(-std::abs(g.point(k).y - 0.5) / (2.0 * eps));
    const double width = dom.bbox().hi.x - dom.bbox().lo.x;
    const double e = diffuse_energy(ScalarField(g, v), make_params(eps, 1.5, eps), dom);
    CHECK(e == doctest::Approx(width).epsilon(0.02));
  }
  SUBCASE("quadratic field converges at second order") {
    const double eps = 0.2;
    const Params p = make_params(eps, 1.5, eps);
    auto f = [](Vec2 q) { return 0.5 + 0.3 * q.x * q.x - 0.2 * q.y; };
    double errors[3];
    int n_index = 0;
    for (int n : {17, 33, 65}) {
      const Domain dom = fixture::square_domain(n);
      const Grid& g = dom.grid();
      std::vector<double> v(g.size());
      for (std::size_t k = 0; k < g.size(); ++k) v[k] = f(g.point(k));
      const double x0 = dom.bbox().lo.x, x1 = dom.bbox().hi.x, y0 = dom.bbox().lo.y, y1 = dom.bbox().hi.y;
      const double wx = x1 - x0, wy = y1 - y0;
      const double i2x = (std::pow(x1, 3) - std::pow(x0, 3)) / 3.0;
      const double i4x = (std::pow(x1, 5) - std::pow(x0, 5)) / 5.0;
      const double grad = 0.36 * i2x * wy + 0.04 * wx * wy;
      // (u - 1)^2 = (0.3 x^2 + g(y))^2 with g = -0.5 - 0.2 y
      const double ig = -0.5 * wy - 0.1 * (y1 * y1 - y0 * y0);
      const double ig2 = (std::pow(0.5 + 0.2 * y1, 3) - std::pow(0.5 + 0.2 * y0, 3)) / 0.6;
      const double well = 0.09 * i4x * wy + 0.6 * i2x * ig + wx * ig2;
      const double exact = eps * grad + well / (4.0 * eps);
      errors[n_index++] = std::abs(diffuse_energy(ScalarField(g, v), p, dom) - exact);
    }
    CHECK(errors[0] / errors[1] >= 3.0);
    CHECK(errors[1] / errors[2] >= 3.0);
  }
}

TEST_CASE("system dump is symmetric") {
  const Domain dom = fixture::square_domain(9);
  const DiscreteMeasure mu = measure({0.1, 0.1}, {{{0.9, 0.8}, 0.5}});
  std::ostringstream os;
  write_system(os, straight_bundle(mu), mu, make_params(0.1, 1.5, 0.1), dom);
  std::istringstream is(os.str());
  std::map<std::pair<std::size_t, std::size_t>, double> entries;
  std::size_t i = 0, j = 0;
  double v = 0.0;
  while (is >> i >> j >> v) entries[{i, j}] = v;
  CHECK(entries.size() == 7 * 7 + 2 * 2 * 7 * 6);
  for (const auto& [key, value] : entries) {
    CHECK(entries.at({key.second, key.first}) == value);
    if (key.first == key.second) CHECK(value > 0.0);
  }
}
