// Shared fixtures for the unit tests.
#pragma once

#include <random>

#include "steiner/problem.hpp"

namespace fixture {

inline steiner::ConvexPolygon unit_square() { return steiner::ConvexPolygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

inline steiner::Domain square_domain(int n) { return steiner::Domain(unit_square(), n, n); }

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240611);
  return gen;
}

inline double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng()); }

inline steiner::Vec2 random_point(double lo = 0.0, double hi = 1.0) { return {uniform(lo, hi), uniform(lo, hi)}; }

}  // namespace fixture
