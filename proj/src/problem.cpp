#include "steiner/problem.hpp"

#include <limits>
#include <sstream>

namespace steiner {

namespace {

bool in_open_unit(double v) { return v > 0.0 && v < 1.0; }

// Clamp s to [0, n-1] and split into a cell index and a local coordinate.
// Coordinates within 1e-9 cells of a node snap to it so that node values
// are reproduced exactly.
void locate(double s, int n, int& cell, double& frac) {
  s = std::clamp(s, 0.0, static_cast<double>(n - 1));
  const double r = std::round(s);
  if (std::abs(s - r) < 1e-9) s = r;
  cell = std::min(static_cast<int>(std::floor(s)), n - 2);
  frac = s - cell;
}

}  // namespace

Params make_params(double lambda, double beta_exp, double epsilon) {
  if (!in_open_unit(lambda)) {
    std::ostringstream msg;
    msg << "lambda must lie in (0,1), got " << lambda;
    throw ParameterError(msg.str());
  }
  if (!in_open_unit(epsilon)) {
    std::ostringstream msg;
    msg << "epsilon must lie in (0,1), got " << epsilon;
    throw ParameterError(msg.str());
  }
  if (!(beta_exp > 1.0 && beta_exp < 2.0)) {
    std::ostringstream msg;
    msg << "beta must lie in (1,2), got " << beta_exp;
    throw ParameterError(msg.str());
  }
  Params p;
  p.epsilon = epsilon;
  p.lambda = lambda;
  p.beta_exp = beta_exp;
  p.delta = std::pow(lambda, beta_exp);
  p.lambda_cap = 2.0 + 3.0 / p.delta;
  return p;
}

ConvexPolygon::ConvexPolygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw DomainError("polygon needs at least 3 vertices");
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 a = vertices_[k];
    const Vec2 b = vertices_[(k + 1) % n];
    const Vec2 c = vertices_[(k + 2) % n];
    if (!std::isfinite(a.x) || !std::isfinite(a.y)) throw DomainError("polygon vertex is not finite");
    if (a == b) throw DomainError("polygon has repeated consecutive vertices");
    if (cross(b - a, c - b) < 0.0) throw DomainError("polygon must be convex and counterclockwise");
  }
}

double ConvexPolygon::diameter() const {
  double d = 0.0;
  for (const Vec2& a : vertices_)
    for (const Vec2& b : vertices_) d = std::max(d, distance(a, b));
  return d;
}

Vec2 ConvexPolygon::lower() const {
  Vec2 lo = vertices_.front();
  for (const Vec2& v : vertices_) lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
  return lo;
}

Vec2 ConvexPolygon::upper() const {
  Vec2 hi = vertices_.front();
  for (const Vec2& v : vertices_) hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
  return hi;
}

bool point_in_omega0(Vec2 p, const ConvexPolygon& poly, double tol) {
  const auto& v = poly.vertices();
  const std::size_t n = v.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 e = v[(k + 1) % n] - v[k];
    // signed distance of p to the edge line, positive on the inner side
    if (cross(e, p - v[k]) < -tol * norm(e)) return false;
  }
  return true;
}

Vec2 project_to_polygon(Vec2 p, const ConvexPolygon& poly) {
  if (point_in_omega0(p, poly, 0.0)) return p;
  const auto& v = poly.vertices();
  Vec2 best = v.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < v.size(); ++k) {
    const Vec2 a = v[k];
    const Vec2 e = v[(k + 1) % v.size()] - a;
    const double t = std::clamp(dot(p - a, e) / dot(e, e), 0.0, 1.0);
    const Vec2 q = a + t * e;
    const double d = distance(p, q);
    if (d < best_d) {
      best_d = d;
      best = q;
    }
  }
  return best;
}

Domain::Domain(ConvexPolygon omega0, int nx, int ny, std::optional<double> eta0)
    : omega0_(std::move(omega0)) {
  if (nx < 8 || ny < 8) throw DomainError("grid needs at least 8 nodes per direction");
  eta0_ = eta0.value_or(0.25 * omega0_.diameter());
  if (!(eta0_ > 0.0)) throw DomainError("safety margin eta0 must be positive");
  const Vec2 lo = omega0_.lower();
  const Vec2 hi = omega0_.upper();
  bbox_ = {{lo.x - eta0_, lo.y - eta0_}, {hi.x + eta0_, hi.y + eta0_}};
  grid_.nx = nx;
  grid_.ny = ny;
  grid_.x0 = bbox_.lo.x;
  grid_.y0 = bbox_.lo.y;
  grid_.hx = (bbox_.hi.x - bbox_.lo.x) / (nx - 1);
  grid_.hy = (bbox_.hi.y - bbox_.lo.y) / (ny - 1);

  const double tol = 1e-9 * grid_.hmin();
  mask_.assign(grid_.size(), 0);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      std::uint8_t f = 0;
      if (grid_.on_boundary(i, j)) f |= node_flag::boundary;
      if (point_in_omega0(grid_.point(i, j), omega0_, tol)) f |= node_flag::omega0;
      mask_[grid_.index(i, j)] = f;
    }
  }
}

std::size_t Domain::nearest_omega0_node(Vec2 p) const {
  std::size_t best = grid_.size();
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    if (!in_omega0(k)) continue;
    const double d = distance(grid_.point(k), p);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  if (best == grid_.size()) throw DomainError("no grid node lies inside omega0; refine the grid");
  return best;
}

DiscreteMeasure::DiscreteMeasure(std::vector<Atom> atoms, Vec2 base_point, const ConvexPolygon& poly)
    : atoms_(std::move(atoms)), base_(base_point) {
  if (!point_in_omega0(base_, poly, 1e-9)) throw DomainError("base point lies outside omega0");
  for (const Atom& a : atoms_) {
    if (!(a.weight > 0.0) || !std::isfinite(a.weight)) throw DomainError("atom weights must be positive");
    if (!point_in_omega0(a.point, poly, 1e-9)) throw DomainError("atom lies outside omega0");
  }
  if (atoms_.empty()) throw DomainError("measure needs at least one atom");
}

double DiscreteMeasure::total_mass() const {
  double m = 0.0;
  for (const Atom& a : atoms_) m += a.weight;
  return m;
}

BilinearStencil bilinear_stencil(const Grid& g, Vec2 p) {
  int i = 0;
  int j = 0;
  double fx = 0.0;
  double fy = 0.0;
  locate((p.x - g.x0) / g.hx, g.nx, i, fx);
  locate((p.y - g.y0) / g.hy, g.ny, j, fy);
  BilinearStencil s;
  s.node = {g.index(i, j), g.index(i + 1, j), g.index(i, j + 1), g.index(i + 1, j + 1)};
  s.weight = {(1.0 - fx) * (1.0 - fy), fx * (1.0 - fy), (1.0 - fx) * fy, fx * fy};
  return s;
}

ScalarField::ScalarField(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw DomainError("field size does not match grid");
  for (double v : values_)
    if (!std::isfinite(v)) throw DomainError("field values must be finite");
}

ScalarField ScalarField::constant(const Grid& grid, double value) {
  return ScalarField(grid, std::vector<double>(grid.size(), value));
}

double ScalarField::eval(Vec2 p) const {
  int i = 0;
  int j = 0;
  double fx = 0.0;
  double fy = 0.0;
  locate((p.x - grid_.x0) / grid_.hx, grid_.nx, i, fx);
  locate((p.y - grid_.y0) / grid_.hy, grid_.ny, j, fy);
  const double v00 = at(i, j);
  if (fx == 0.0 && fy == 0.0) return v00;
  const double v10 = at(i + 1, j);
  const double v01 = at(i, j + 1);
  const double v11 = at(i + 1, j + 1);
  return (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) + fy * ((1.0 - fx) * v01 + fx * v11);
}

Polyline::Polyline(std::vector<Vec2> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw DomainError("polyline needs at least 2 points");
  cumulative_.resize(points_.size());
  cumulative_[0] = 0.0;
  for (std::size_t k = 1; k < points_.size(); ++k) {
    if (!std::isfinite(points_[k].x) || !std::isfinite(points_[k].y))
      throw DomainError("polyline point is not finite");
    cumulative_[k] = cumulative_[k - 1] + distance(points_[k - 1], points_[k]);
  }
}

Vec2 Polyline::at_arclength(double s) const {
  if (s <= 0.0) return points_.front();
  if (s >= length()) return points_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  const std::size_t k = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  const double seg = segment_length(k);
  if (seg <= 0.0) return points_[k];
  const double t = (s - cumulative_[k]) / seg;
  return points_[k] + t * (points_[k + 1] - points_[k]);
}

Polyline Polyline::simplified() const {
  std::vector<Vec2> out;
  out.reserve(points_.size());
  out.push_back(points_.front());
  for (std::size_t k = 1; k < points_.size(); ++k)
    if (!(points_[k] == out.back())) out.push_back(points_[k]);
  if (out.size() == 1) out.push_back(points_.back());
  return Polyline(std::move(out));
}

double polyline_length(const Polyline& curve) { return curve.length(); }

double CurveBundle::total_length() const {
  double l = 0.0;
  for (const Polyline& c : curves) l += c.length();
  return l;
}

void check_bundle(const CurveBundle& bundle, const DiscreteMeasure& measure, double tol) {
  if (bundle.size() != measure.size()) throw DomainError("curve count differs from atom count");
  for (std::size_t i = 0; i < bundle.size(); ++i) {
    if (distance(bundle.curves[i].front(), measure.base_point()) > tol ||
        distance(bundle.curves[i].back(), measure.atoms()[i].point) > tol) {
      std::ostringstream msg;
      msg << "curve " << i << " does not join the base point to its atom";
      throw DomainError(msg.str());
    }
  }
}

CurveBundle straight_bundle(const DiscreteMeasure& measure) {
  CurveBundle b;
  for (const Atom& a : measure.atoms()) b.curves.emplace_back(std::vector<Vec2>{measure.base_point(), a.point});
  return b;
}

}  // namespace steiner
