#include "steiner/curves.hpp"

#include <limits>
#include <sstream>

namespace steiner {

namespace {

// Parameter interval [t0, t1] of a + t (b - a), t in [0,1], inside the
// closed disc. Returns false when the segment misses the disc.
bool clip_segment(Vec2 a, Vec2 b, Vec2 c, double r, double& t0, double& t1) {
  const Vec2 d = b - a;
  const Vec2 f = a - c;
  const double A = dot(d, d);
  const double C = dot(f, f) - r * r;
  if (A == 0.0) {
    if (C > 0.0) return false;
    t0 = 0.0;
    t1 = 1.0;
    return true;
  }
  const double B = dot(f, d);
  const double disc = B * B - A * C;
  if (disc < 0.0) return false;
  const double s = std::sqrt(disc);
  // stable roots of A t^2 + 2 B t + C
  double r0 = 0.0;
  double r1 = 0.0;
  if (B >= 0.0) {
    const double q = -(B + s);
    r0 = q / A;
    r1 = (q != 0.0) ? C / q : 0.0;
  } else {
    const double q = -B + s;
    r1 = q / A;
    r0 = C / q;
  }
  if (r0 > r1) std::swap(r0, r1);
  t0 = std::max(r0, 0.0);
  t1 = std::min(r1, 1.0);
  return t0 <= t1;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const double dd = dot(d, d);
  const double t = dd > 0.0 ? std::clamp(dot(p - a, d) / dd, 0.0, 1.0) : 0.0;
  return distance(p, a + t * d);
}

double point_curve_distance(Vec2 p, const Polyline& curve) {
  const auto& pts = curve.points();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) best = std::min(best, point_segment_distance(p, pts[k], pts[k + 1]));
  return best;
}

std::vector<Vec2> scan_centers(const Polyline& curve) {
  std::vector<Vec2> centers;
  const auto& pts = curve.points();
  centers.reserve(2 * pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    centers.push_back(pts[k]);
    if (k + 1 < pts.size()) centers.push_back(0.5 * (pts[k] + pts[k + 1]));
  }
  return centers;
}

struct Violation {
  bool found = false;
  Vec2 center;
  double radius = 0.0;
  double ratio = 0.0;
};

// Largest radius first; within a radius, the largest ratio.
Violation find_violation(const Polyline& curve, const std::vector<double>& radii_desc, double threshold) {
  Violation v;
  const auto centers = scan_centers(curve);
  for (double r : radii_desc) {
    for (const Vec2& c : centers) {
      const double ratio = arc_length_in_ball(curve, c, r) / r;
      if (ratio >= threshold && ratio > v.ratio) {
        v = {true, c, r, ratio};
      }
    }
    if (v.found) return v;
  }
  return v;
}

}  // namespace

double arc_length_in_ball(const Polyline& curve, Vec2 center, double r) {
  const auto& pts = curve.points();
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    double t0 = 0.0;
    double t1 = 0.0;
    if (clip_segment(pts[k], pts[k + 1], center, r, t0, t1)) total += (t1 - t0) * curve.segment_length(k);
  }
  return total;
}

std::vector<double> scan_radii(const Polyline& curve, double h) {
  double diam = 0.0;
  const auto& pts = curve.points();
  for (const Vec2& a : pts)
    for (const Vec2& b : pts) diam = std::max(diam, distance(a, b));
  std::vector<double> radii;
  if (diam <= 0.0 || !(h > 0.0)) return radii;
  const int jmax = std::max(0, static_cast<int>(std::ceil(std::log2(diam / h))));
  for (int j = 0; j <= jmax; ++j) radii.push_back(std::ldexp(diam, -j));
  return radii;
}

AhlforsReport ahlfors_scan(const Polyline& curve, const std::vector<double>& radii) {
  AhlforsReport rep;
  const auto centers = scan_centers(curve);
  for (double r : radii) {
    if (!(r > 0.0)) throw ParameterError("scan radii must be positive");
    for (const Vec2& c : centers) {
      const double ratio = arc_length_in_ball(curve, c, r) / r;
      if (ratio > rep.worst_ratio) rep = {ratio, {0, c, r}};
    }
  }
  return rep;
}

CurveBundle replace_arc(const CurveBundle& bundle, std::size_t i0, Vec2 x, double r, const ConvexPolygon& poly,
                        double membership_tol) {
  if (i0 >= bundle.size()) throw DomainError("curve index out of range");
  if (!(r > 0.0)) throw ParameterError("replacement radius must be positive");
  const Polyline& curve = bundle.curves[i0];
  if (point_curve_distance(x, curve) > membership_tol) {
    std::ostringstream msg;
    msg << "ball center is not on curve " << i0;
    throw DomainError(msg.str());
  }

  const auto& pts = curve.points();
  const std::size_t nseg = pts.size() - 1;
  const double r2 = r * r;
  auto inside = [&](Vec2 p) { return dot(p - x, p - x) <= r2; };

  // entry: (segment, local t) of the first point in the closed ball
  std::size_t in_seg = 0;
  double in_t = 0.0;
  bool hit = false;
  if (!inside(pts.front())) {
    for (std::size_t k = 0; k < nseg && !hit; ++k) {
      double t0 = 0.0;
      double t1 = 0.0;
      if (clip_segment(pts[k], pts[k + 1], x, r, t0, t1)) {
        in_seg = k;
        in_t = t0;
        hit = true;
      }
    }
  } else {
    hit = true;
  }
  if (!hit) return bundle;

  std::size_t out_seg = nseg - 1;
  double out_t = 1.0;
  if (!inside(pts.back())) {
    for (std::size_t k = nseg; k-- > 0;) {
      double t0 = 0.0;
      double t1 = 0.0;
      if (clip_segment(pts[k], pts[k + 1], x, r, t0, t1)) {
        out_seg = k;
        out_t = t1;
        break;
      }
    }
  }
  const double s_in = curve.cumulative()[in_seg] + in_t * curve.segment_length(in_seg);
  const double s_out = curve.cumulative()[out_seg] + out_t * curve.segment_length(out_seg);
  if (!(s_out > s_in)) return bundle;

  const Vec2 a = pts[in_seg] + in_t * (pts[in_seg + 1] - pts[in_seg]);
  const Vec2 b = pts[out_seg] + out_t * (pts[out_seg + 1] - pts[out_seg]);
  std::vector<Vec2> out;
  out.reserve(pts.size());
  for (std::size_t k = 0; k <= in_seg; ++k) out.push_back(pts[k]);
  out.push_back(a);
  out.push_back(b);
  for (std::size_t k = out_seg + 1; k < pts.size(); ++k) out.push_back(pts[k]);
  // entry/exit at the curve ends reproduce the exact endpoints
  if (inside(pts.front())) out.front() = pts.front();
  if (inside(pts.back())) out.back() = pts.back();

  for (const Vec2& p : {a, b})
    if (!point_in_omega0(p, poly, 1e-9)) throw DomainError("replacement chord leaves omega0");

  CurveBundle result = bundle;
  result.curves[i0] = Polyline(std::move(out)).simplified();
  return result;
}

EnforceResult enforce_ahlfors(const CurveBundle& bundle, const ScalarField& u, const Params& params,
                              const ConvexPolygon& poly) {
  EnforceResult res{bundle, 0};
  const double h = u.grid().hmin();
  const double threshold = params.lambda_cap;

  // Each replacement removes at least (threshold - 2) * r_min of length.
  double r_min = std::numeric_limits<double>::infinity();
  for (const Polyline& c : bundle.curves) {
    const auto radii = scan_radii(c, h);
    if (!radii.empty()) r_min = std::min(r_min, radii.back());
  }
  if (!std::isfinite(r_min)) return res;
  const int max_steps =
      static_cast<int>(std::ceil(bundle.total_length() / ((threshold - 2.0) * r_min))) + static_cast<int>(bundle.size());

  for (int step = 0; step <= max_steps; ++step) {
    Violation best;
    std::size_t best_curve = 0;
    for (std::size_t i = 0; i < res.bundle.size(); ++i) {
      const auto radii = scan_radii(res.bundle.curves[i], h);
      const Violation v = find_violation(res.bundle.curves[i], radii, threshold);
      if (v.found && (!best.found || v.radius > best.radius || (v.radius == best.radius && v.ratio > best.ratio))) {
        best = v;
        best_curve = i;
      }
    }
    if (!best.found) return res;
    res.bundle = replace_arc(res.bundle, best_curve, best.center, best.radius, poly, 1e-9);
    ++res.replacements;
  }
  throw Error("Ahlfors enforcement did not terminate");
}

Polyline reparametrize_constant_speed(const Polyline& curve, int n_points) {
  if (n_points < 2) throw ParameterError("reparametrization needs at least 2 points");
  const double L = curve.length();
  if (L <= 0.0) return Polyline({curve.front(), curve.back()});
  std::vector<Vec2> out(static_cast<std::size_t>(n_points));
  out.front() = curve.front();
  out.back() = curve.back();
  for (int k = 1; k + 1 < n_points; ++k) out[k] = curve.at_arclength(L * k / (n_points - 1));
  return Polyline(std::move(out));
}

double bundle_diameter(const CurveBundle& bundle) {
  std::vector<Vec2> pts;
  for (const Polyline& c : bundle.curves) pts.insert(pts.end(), c.points().begin(), c.points().end());
  double d = 0.0;
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b) d = std::max(d, distance(pts[a], pts[b]));
  return d;
}

std::vector<Ball> tube_covering(const CurveBundle& bundle, double rho) {
  if (!(rho > 0.0)) throw ParameterError("covering radius must be positive");
  if (bundle.size() == 0) return {};
  const Vec2 base = bundle.curves.front().front();
  if (rho >= bundle_diameter(bundle)) return {{base, rho}};

  // Dense samples along the image; anything within 2 rho/5 of a selected
  // center is covered with room to spare for points between samples.
  const double step = rho / 20.0;
  std::vector<Vec2> centers;
  const double sep = 0.4 * rho;
  for (const Polyline& c : bundle.curves) {
    const double L = c.length();
    const int n = std::max(1, static_cast<int>(std::ceil(L / step)));
    for (int k = 0; k <= n; ++k) {
      const Vec2 p = c.at_arclength(L * k / n);
      bool far = true;
      for (const Vec2& q : centers) {
        if (distance(p, q) <= sep) {
          far = false;
          break;
        }
      }
      if (far) centers.push_back(p);
    }
  }
  std::vector<Ball> balls;
  balls.reserve(centers.size());
  for (const Vec2& c : centers) balls.push_back({c, rho});
  return balls;
}

}  // namespace steiner
