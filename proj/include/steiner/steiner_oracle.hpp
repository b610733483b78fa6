// Exact Euclidean Steiner minimal trees for two to four terminals.
#pragma once

#include <utility>
#include <vector>

#include <json.hpp>

#include "steiner/problem.hpp"

namespace steiner {

struct SteinerTree {
  /// Terminals first (input order), then added Steiner points.
  std::vector<Vec2> nodes;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  double length = 0.0;
  std::size_t terminal_count = 0;
};

struct FermatResult {
  Vec2 point;
  double length = 0.0;
};

/// Point minimizing the summed distance to a, b, c. When an angle reaches
/// 120 degrees the minimizer is that vertex.
FermatResult fermat_point(Vec2 a, Vec2 b, Vec2 c);

/// Minimal tree over 2..4 distinct terminals. Throws ParameterError for any
/// other count.
SteinerTree exact_steiner(const std::vector<Vec2>& terminals);

/// Euclidean minimum spanning tree length (Prim).
double mst_length(const std::vector<Vec2>& terminals);

/// Points every `spacing` along each edge, endpoints included.
std::vector<Vec2> sample_tree(const SteinerTree& tree, double spacing);

nlohmann::ordered_json tree_json(const SteinerTree& tree);

}  // namespace steiner
