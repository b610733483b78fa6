#include "steiner/io.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace steiner {

namespace {

void write_value(std::ostream& os, double v) {
  if (std::isfinite(v))
    os << v;
  else
    os << (v > 0 ? "inf" : "-inf");
}

double parse_value(const std::string& tok) {
  if (tok == "inf") return std::numeric_limits<double>::infinity();
  if (tok == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(tok, &used);
  if (used != tok.size()) throw Error("malformed number in dump: " + tok);
  return v;
}

}  // namespace

void write_field(std::ostream& os, const Grid& g, std::span<const double> values) {
  os << std::setprecision(17);
  os << "field " << g.nx << ' ' << g.ny << ' ' << g.x0 << ' ' << g.y0 << ' ' << g.hx << ' ' << g.hy << '\n';
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (i) os << ' ';
      write_value(os, values[g.index(i, j)]);
    }
    os << '\n';
  }
}

void write_field(std::ostream& os, const ScalarField& field) { write_field(os, field.grid(), field.values()); }

FieldDump read_field(std::istream& is) {
  std::string tag;
  FieldDump d;
  if (!(is >> tag) || tag != "field") throw Error("field dump must start with 'field'");
  if (!(is >> d.grid.nx >> d.grid.ny >> d.grid.x0 >> d.grid.y0 >> d.grid.hx >> d.grid.hy))
    throw Error("malformed field header");
  if (d.grid.nx < 2 || d.grid.ny < 2) throw Error("field dump has too few nodes");
  d.values.reserve(d.grid.size());
  std::string tok;
  while (d.values.size() < d.grid.size() && is >> tok) d.values.push_back(parse_value(tok));
  if (d.values.size() != d.grid.size()) throw Error("field dump is truncated");
  return d;
}

void write_points(std::ostream& os, std::span<const Vec2> points) {
  os << std::setprecision(17);
  for (const Vec2& p : points) os << p.x << ' ' << p.y << '\n';
}

std::vector<Vec2> read_points(std::istream& is) {
  std::vector<Vec2> pts;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    Vec2 p;
    if (!(ls >> p.x)) continue;
    if (!(ls >> p.y)) throw Error("malformed point line: " + line);
    pts.push_back(p);
  }
  return pts;
}

void write_polyline(std::ostream& os, const Polyline& curve) { write_points(os, curve.points()); }

Polyline read_polyline(std::istream& is) { return Polyline(read_points(is)); }

void save_field(const std::string& path, const ScalarField& field) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  write_field(os, field);
}

ScalarField load_field(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot read " + path);
  FieldDump d = read_field(is);
  return ScalarField(d.grid, std::move(d.values));
}

void save_points(const std::string& path, std::span<const Vec2> points) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  write_points(os, points);
}

std::vector<Vec2> load_points(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot read " + path);
  return read_points(is);
}

}  // namespace steiner
