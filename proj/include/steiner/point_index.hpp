// Uniform bucket grid for exact nearest-point queries over a fixed 2-D set.
#pragma once

#include <vector>

#include "steiner/problem.hpp"

namespace steiner {

class PointIndex {
 public:
  /// Throws DomainError for an empty set.
  explicit PointIndex(std::vector<Vec2> points);

  /// Euclidean distance from q to the nearest indexed point.
  double nearest_distance(Vec2 q) const;
  std::size_t size() const { return points_.size(); }

 private:
  std::vector<Vec2> points_;
  Vec2 lo_;
  double cell_ = 1.0;
  int cols_ = 1;
  int rows_ = 1;
  std::vector<std::size_t> start_;  // CSR offsets per bucket
  std::vector<std::size_t> items_;
};

}  // namespace steiner
