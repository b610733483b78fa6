#include "steiner/elliptic.hpp"

#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "steiner/geodesic.hpp"

namespace steiner {

namespace {

// Interior operator of the potential problem:
//   eps * K + diag(mass/(4 eps) + b/lambda)
// with K the 5-point stiffness, i.e. u^T K u = sum over edges of
// (hy/hx) (du)^2 for x-edges and (hx/hy) (du)^2 for y-edges.
struct PotentialOperator {
  const Grid& g;
  double cx = 0.0;  // eps * hy / hx
  double cy = 0.0;  // eps * hx / hy
  std::vector<double> diag;

  PotentialOperator(const Grid& grid, const Params& p, std::span<const double> curve_weights) : g(grid) {
    cx = p.epsilon * g.hy / g.hx;
    cy = p.epsilon * g.hx / g.hy;
    const double mass = g.hx * g.hy / (4.0 * p.epsilon);
    diag.assign(g.size(), 0.0);
    for (int j = 1; j + 1 < g.ny; ++j)
      for (int i = 1; i + 1 < g.nx; ++i) {
        const std::size_t k = g.index(i, j);
        diag[k] = 2.0 * cx + 2.0 * cy + mass + curve_weights[k] / p.lambda;
      }
  }

  // y = A x on interior nodes; boundary entries of x are ignored and y is
  // zero there.
  void apply(std::span<const double> x, std::span<double> y) const {
    const int nx = g.nx;
    for (int i = 0; i < nx; ++i) {
      y[g.index(i, 0)] = 0.0;
      y[g.index(i, g.ny - 1)] = 0.0;
    }
    for (int j = 1; j + 1 < g.ny; ++j) {
      y[g.index(0, j)] = 0.0;
      y[g.index(nx - 1, j)] = 0.0;
      for (int i = 1; i + 1 < nx; ++i) {
        const std::size_t k = g.index(i, j);
        double s = diag[k] * x[k];
        if (i > 1) s -= cx * x[k - 1];
        if (i + 2 < nx) s -= cx * x[k + 1];
        if (j > 1) s -= cy * x[k - nx];
        if (j + 2 < g.ny) s -= cy * x[k + nx];
        y[k] = s;
      }
    }
  }
};

double dot_interior(const Grid& g, std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (int j = 1; j + 1 < g.ny; ++j)
    for (int i = 1; i + 1 < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      s += a[k] * b[k];
    }
  return s;
}

}  // namespace

double CurveMassForm::apply(std::span<const double> x, std::span<const double> y) const {
  double s = 0.0;
  for (const Triplet& t : triplets) s += x[t.row] * t.value * y[t.col];
  return s;
}

std::vector<double> CurveMassForm::lumped() const {
  std::vector<double> d(grid.size(), 0.0);
  for (const Triplet& t : triplets) d[t.row] += t.value;
  return d;
}

CurveMassForm curve_mass_form(const CurveBundle& bundle, const DiscreteMeasure& mu, const Domain& dom) {
  check_bundle(bundle, mu, 1e-9);
  const Grid& g = dom.grid();
  std::map<std::pair<std::size_t, std::size_t>, double> acc;
  CurveMassForm form;
  form.grid = g;
  for (std::size_t i = 0; i < bundle.size(); ++i) {
    const double beta = mu.atoms()[i].weight;
    form.total_weighted_length += beta * bundle.curves[i].length();
    curve_quadrature(bundle.curves[i], curve_step(g), [&](Vec2 p, double w) {
      const BilinearStencil s = bilinear_stencil(g, p);
      for (int a = 0; a < 4; ++a) {
        if (s.weight[a] == 0.0) continue;
        for (int b = 0; b < 4; ++b) {
          if (s.weight[b] == 0.0) continue;
          acc[{s.node[a], s.node[b]}] += beta * w * (s.weight[a] * s.weight[b]);
        }
      }
    });
  }
  form.triplets.reserve(acc.size());
  for (const auto& [key, v] : acc) form.triplets.push_back({key.first, key.second, v});
  return form;
}

std::vector<double> lumped_curve_weights(const CurveBundle& bundle, const DiscreteMeasure& mu, const Grid& g) {
  std::vector<double> d(g.size(), 0.0);
  for (std::size_t i = 0; i < bundle.size(); ++i) {
    const double beta = mu.atoms()[i].weight;
    curve_quadrature(bundle.curves[i], curve_step(g), [&](Vec2 p, double w) {
      const BilinearStencil s = bilinear_stencil(g, p);
      for (int a = 0; a < 4; ++a) d[s.node[a]] += beta * w * s.weight[a];
    });
  }
  return d;
}

EllipticSolution solve_potential(const CurveBundle& bundle, const DiscreteMeasure& mu, const Params& params,
                                 const Domain& dom, const ScalarField* initial, const SolveOptions& opts) {
  check_bundle(bundle, mu, 1e-9);
  const Grid& g = dom.grid();
  const std::vector<double> b_curve = lumped_curve_weights(bundle, mu, g);
  const PotentialOperator A(g, params, b_curve);

  // right-hand side: mass term plus Dirichlet couplings to u = 1
  const double mass = g.hx * g.hy / (4.0 * params.epsilon);
  std::vector<double> rhs(g.size(), 0.0);
  for (int j = 1; j + 1 < g.ny; ++j)
    for (int i = 1; i + 1 < g.nx; ++i) {
      double r = mass;
      if (i == 1) r += A.cx;
      if (i + 2 == g.nx) r += A.cx;
      if (j == 1) r += A.cy;
      if (j + 2 == g.ny) r += A.cy;
      rhs[g.index(i, j)] = r;
    }

  std::vector<double> x(g.size(), 1.0);
  if (initial) {
    if (!(initial->grid() == g)) throw DomainError("initial potential lives on a different grid");
    for (std::size_t k = 0; k < g.size(); ++k) x[k] = (*initial)[k];
  }
  for (int i = 0; i < g.nx; ++i) x[g.index(i, 0)] = x[g.index(i, g.ny - 1)] = 1.0;
  for (int j = 0; j < g.ny; ++j) x[g.index(0, j)] = x[g.index(g.nx - 1, j)] = 1.0;

  const int max_iter = opts.max_iter.value_or(20 * (g.nx + g.ny));
  std::vector<double> r(g.size(), 0.0), z(g.size(), 0.0), p(g.size(), 0.0), q(g.size(), 0.0);
  A.apply(x, q);
  for (std::size_t k = 0; k < g.size(); ++k) r[k] = rhs[k] - q[k];
  const double bnorm = std::sqrt(dot_interior(g, rhs, rhs));
  auto precondition = [&]() {
    for (std::size_t k = 0; k < g.size(); ++k) z[k] = A.diag[k] > 0.0 ? r[k] / A.diag[k] : 0.0;
  };
  precondition();
  p = z;
  double rz = dot_interior(g, r, z);
  double rel = std::sqrt(dot_interior(g, r, r)) / bnorm;
  int it = 0;
  while (rel > opts.rel_tol && it < max_iter) {
    A.apply(p, q);
    const double alpha = rz / dot_interior(g, p, q);
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (A.diag[k] == 0.0) continue;
      x[k] += alpha * p[k];
      r[k] -= alpha * q[k];
    }
    precondition();
    const double rz_new = dot_interior(g, r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t k = 0; k < g.size(); ++k) p[k] = z[k] + beta * p[k];
    rel = std::sqrt(dot_interior(g, r, r)) / bnorm;
    ++it;
  }
  if (rel > opts.rel_tol) {
    std::ostringstream msg;
    msg << "potential solve did not converge: relative residual " << rel << " after " << it << " iterations";
    throw SolverError(msg.str(), it);
  }
  return {ScalarField(g, std::move(x)), it, rel};
}

double diffuse_energy(const ScalarField& u, const Params& params, const Domain& dom) {
  const Grid& g = dom.grid();
  if (!(u.grid() == g)) throw DomainError("field lives on a different grid");
  const double area = g.hx * g.hy;
  double grad = 0.0;
  double well = 0.0;
  for (int j = 0; j + 1 < g.ny; ++j)
    for (int i = 0; i + 1 < g.nx; ++i) {
      const double u00 = u.at(i, j);
      const double u10 = u.at(i + 1, j);
      const double u01 = u.at(i, j + 1);
      const double u11 = u.at(i + 1, j + 1);
      const double dx2 = 0.5 * ((u10 - u00) * (u10 - u00) + (u11 - u01) * (u11 - u01)) / (g.hx * g.hx);
      const double dy2 = 0.5 * ((u01 - u00) * (u01 - u00) + (u11 - u10) * (u11 - u10)) / (g.hy * g.hy);
      grad += area * (dx2 + dy2);
      well += area * 0.25 *
              ((u00 - 1) * (u00 - 1) + (u10 - 1) * (u10 - 1) + (u01 - 1) * (u01 - 1) + (u11 - 1) * (u11 - 1));
    }
  return params.epsilon * grad + well / (4.0 * params.epsilon);
}

void write_system(std::ostream& os, const CurveBundle& bundle, const DiscreteMeasure& mu, const Params& params,
                  const Domain& dom) {
  const Grid& g = dom.grid();
  const PotentialOperator A(g, params, lumped_curve_weights(bundle, mu, g));
  os << std::setprecision(17);
  for (int j = 1; j + 1 < g.ny; ++j)
    for (int i = 1; i + 1 < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      if (j > 1) os << k << ' ' << k - g.nx << ' ' << -A.cy << '\n';
      if (i > 1) os << k << ' ' << k - 1 << ' ' << -A.cx << '\n';
      os << k << ' ' << k << ' ' << A.diag[k] << '\n';
      if (i + 2 < g.nx) os << k << ' ' << k + 1 << ' ' << -A.cx << '\n';
      if (j + 2 < g.ny) os << k << ' ' << k + g.nx << ' ' << -A.cy << '\n';
    }
}

}  // namespace steiner
