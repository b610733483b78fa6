// Plain-text dump formats.
//
//   field:    header `field nx ny x0 y0 hx hy`, then nx*ny values, row-major
//             with the y index outermost. Non-finite values are written as
//             `inf`.
//   polyline: one `x y` pair per line.
//   points:   same layout as polyline.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "steiner/problem.hpp"

namespace steiner {

void write_field(std::ostream& os, const Grid& grid, std::span<const double> values);
void write_field(std::ostream& os, const ScalarField& field);

struct FieldDump {
  Grid grid;
  std::vector<double> values;
};
FieldDump read_field(std::istream& is);

void write_points(std::ostream& os, std::span<const Vec2> points);
std::vector<Vec2> read_points(std::istream& is);

void write_polyline(std::ostream& os, const Polyline& curve);
Polyline read_polyline(std::istream& is);

void save_field(const std::string& path, const ScalarField& field);
ScalarField load_field(const std::string& path);
void save_points(const std::string& path, std::span<const Vec2> points);
std::vector<Vec2> load_points(const std::string& path);

}  // namespace steiner
