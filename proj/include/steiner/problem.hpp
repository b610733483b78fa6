// Problem data shared by every stage of the solver: parameters, the convex
// working set, the Cartesian grid over the safety box, point measures,
// grid fields and polylines.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace steiner {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a numeric parameter leaves its admissible range.
struct ParameterError : Error {
  using Error::Error;
};

/// Raised when geometric input (polygon, points, grid) is inconsistent.
struct DomainError : Error {
  using Error::Error;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

/// Phase-field parameters. delta and lambda_cap are derived from lambda
/// and beta_exp by make_params.
struct Params {
  double epsilon = 0.0;
  double lambda = 0.0;
  double delta = 0.0;
  double beta_exp = 0.0;
  double lambda_cap = 0.0;
};

/// delta = lambda^beta_exp, lambda_cap = 2 + 3/delta. Throws ParameterError
/// unless lambda, epsilon lie in (0,1) and beta_exp in (1,2).
Params make_params(double lambda, double beta_exp, double epsilon);

class ConvexPolygon {
 public:
  /// Vertices must be counterclockwise, at least three, no repeated
  /// consecutive vertex.
  explicit ConvexPolygon(std::vector<Vec2> vertices);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  double diameter() const;
  Vec2 lower() const;
  Vec2 upper() const;

 private:
  std::vector<Vec2> vertices_;
};

/// Closed membership test; points on the boundary count as inside.
bool point_in_omega0(Vec2 p, const ConvexPolygon& poly, double tol = 1e-12);

/// Nearest point of the closed polygon.
Vec2 project_to_polygon(Vec2 p, const ConvexPolygon& poly);

struct Grid {
  int nx = 0;
  int ny = 0;
  double x0 = 0.0;
  double y0 = 0.0;
  double hx = 0.0;
  double hy = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
  int col(std::size_t k) const { return static_cast<int>(k % nx); }
  int row(std::size_t k) const { return static_cast<int>(k / nx); }
  Vec2 point(int i, int j) const { return {x0 + i * hx, y0 + j * hy}; }
  Vec2 point(std::size_t k) const { return point(col(k), row(k)); }
  double hmin() const { return std::min(hx, hy); }
  bool on_boundary(int i, int j) const { return i == 0 || j == 0 || i == nx - 1 || j == ny - 1; }

  friend bool operator==(const Grid&, const Grid&) = default;
};

/// Bilinear basis functions that are nonzero at a point: four nodes and
/// their weights (weights sum to one). Points are clamped onto the grid.
struct BilinearStencil {
  std::array<std::size_t, 4> node{};
  std::array<double, 4> weight{};
};
BilinearStencil bilinear_stencil(const Grid& grid, Vec2 p);

namespace node_flag {
inline constexpr std::uint8_t boundary = 1;  // on the boundary of the box
inline constexpr std::uint8_t omega0 = 2;    // inside the closed working set
}  // namespace node_flag

struct Box {
  Vec2 lo;
  Vec2 hi;
};

class Domain {
 public:
  /// The box is the bounding box of omega0 inflated by eta0; when eta0 is
  /// absent it defaults to a quarter of the polygon diameter.
  Domain(ConvexPolygon omega0, int nx, int ny, std::optional<double> eta0 = std::nullopt);

  const ConvexPolygon& omega0() const { return omega0_; }
  const Box& bbox() const { return bbox_; }
  const Grid& grid() const { return grid_; }
  double eta0() const { return eta0_; }
  const std::vector<std::uint8_t>& node_mask() const { return mask_; }
  bool in_omega0(std::size_t k) const { return mask_[k] & node_flag::omega0; }
  bool is_boundary(std::size_t k) const { return mask_[k] & node_flag::boundary; }

  /// Nearest grid node inside omega0; ties resolve to the lowest index.
  std::size_t nearest_omega0_node(Vec2 p) const;

 private:
  ConvexPolygon omega0_;
  Box bbox_;
  double eta0_ = 0.0;
  Grid grid_;
  std::vector<std::uint8_t> mask_;
};

struct Atom {
  Vec2 point;
  double weight = 0.0;
};

class DiscreteMeasure {
 public:
  DiscreteMeasure(std::vector<Atom> atoms, Vec2 base_point, const ConvexPolygon& poly);

  const std::vector<Atom>& atoms() const { return atoms_; }
  Vec2 base_point() const { return base_; }
  std::size_t size() const { return atoms_.size(); }
  double total_mass() const;

 private:
  std::vector<Atom> atoms_;
  Vec2 base_;
};

/// Grid-sampled function with bilinear evaluation. Values are row-major
/// with the row (y) index outermost.
class ScalarField {
 public:
  ScalarField(Grid grid, std::vector<double> values);
  static ScalarField constant(const Grid& grid, double value);

  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }
  double operator[](std::size_t k) const { return values_[k]; }
  double at(int i, int j) const { return values_[grid_.index(i, j)]; }

  /// Bilinear interpolation; points outside the grid are clamped onto it.
  double eval(Vec2 p) const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

class Polyline {
 public:
  explicit Polyline(std::vector<Vec2> points);

  const std::vector<Vec2>& points() const { return points_; }
  Vec2 front() const { return points_.front(); }
  Vec2 back() const { return points_.back(); }
  std::size_t size() const { return points_.size(); }
  double length() const { return cumulative_.back(); }
  /// cumulative()[k] is the arc length from the first point to point k.
  const std::vector<double>& cumulative() const { return cumulative_; }
  double segment_length(std::size_t k) const { return cumulative_[k + 1] - cumulative_[k]; }
  Vec2 at_arclength(double s) const;

  /// Drops zero-length segments; a fully degenerate curve keeps its two
  /// endpoints.
  Polyline simplified() const;

 private:
  std::vector<Vec2> points_;
  std::vector<double> cumulative_;
};

double polyline_length(const Polyline& curve);

/// One curve per atom, curve i running from the base point to atom i.
struct CurveBundle {
  std::vector<Polyline> curves;

  std::size_t size() const { return curves.size(); }
  double total_length() const;
};

/// Throws DomainError unless the bundle matches the measure atom by atom.
void check_bundle(const CurveBundle& bundle, const DiscreteMeasure& measure, double tol = 1e-12);

/// Straight segments from the base point to every atom.
CurveBundle straight_bundle(const DiscreteMeasure& measure);

}  // namespace steiner
