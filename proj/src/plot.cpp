#include <iomanip>
#include <ostream>

#include "steiner/app.hpp"

namespace steiner {

namespace {

struct Frame {
  Box box;
  double scale = 1.0;
  double margin = 20.0;

  double px(double x) const { return margin + (x - box.lo.x) * scale; }
  double py(double y) const { return margin + (box.hi.y - y) * scale; }
};

void polyline(std::ostream& os, const Frame& f, const std::vector<Vec2>& pts, const char* style) {
  os << "<polyline fill=\"none\" " << style << " points=\"";
  for (const Vec2& p : pts) os << f.px(p.x) << ',' << f.py(p.y) << ' ';
  os << "\"/>\n";
}

}  // namespace

void write_svg(std::ostream& os, const Domain& dom, const ScalarField& u, double t, const CurveBundle& bundle,
               const std::vector<Vec2>& terminals, const SteinerTree* oracle) {
  Frame f;
  f.box = dom.bbox();
  const double w = f.box.hi.x - f.box.lo.x;
  const double h = f.box.hi.y - f.box.lo.y;
  f.scale = 640.0 / std::max(w, h);
  os << std::setprecision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w * f.scale + 2 * f.margin << "\" height=\""
     << h * f.scale + 2 * f.margin << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  std::vector<Vec2> poly = dom.omega0().vertices();
  poly.push_back(poly.front());
  polyline(os, f, poly, "stroke=\"#888\" stroke-width=\"1\"");

  // marching squares on the t level set
  const Grid& g = dom.grid();
  os << "<path fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1\" d=\"";
  for (int j = 0; j + 1 < g.ny; ++j)
    for (int i = 0; i + 1 < g.nx; ++i) {
      const std::array<std::pair<int, int>, 4> c = {{{i, j}, {i + 1, j}, {i + 1, j + 1}, {i, j + 1}}};
      std::vector<Vec2> hits;
      for (int e = 0; e < 4; ++e) {
        const auto [ai, aj] = c[e];
        const auto [bi, bj] = c[(e + 1) % 4];
        const double fa = u.at(ai, aj) - t;
        const double fb = u.at(bi, bj) - t;
        if ((fa < 0.0) == (fb < 0.0)) continue;
        const double s = fa / (fa - fb);
        hits.push_back(g.point(ai, aj) + s * (g.point(bi, bj) - g.point(ai, aj)));
      }
      for (std::size_t k = 0; k + 1 < hits.size(); k += 2)
        os << 'M' << f.px(hits[k].x) << ',' << f.py(hits[k].y) << 'L' << f.px(hits[k + 1].x) << ','
           << f.py(hits[k + 1].y);
    }
  os << "\"/>\n";

  for (const Polyline& c : bundle.curves) polyline(os, f, c.points(), "stroke=\"#d62728\" stroke-width=\"1.5\"");

  if (oracle) {
    for (auto [a, b] : oracle->edges)
      polyline(os, f, {oracle->nodes[a], oracle->nodes[b]},
               "stroke=\"#2ca02c\" stroke-width=\"1\" stroke-dasharray=\"4,3\"");
  }
  for (const Vec2& p : terminals)
    os << "<circle cx=\"" << f.px(p.x) << "\" cy=\"" << f.py(p.y) << "\" r=\"4\" fill=\"black\"/>\n";
  os << "</svg>\n";
}

}  // namespace steiner
