#include "steiner/point_index.hpp"

#include <algorithm>
#include <limits>

namespace steiner {

PointIndex::PointIndex(std::vector<Vec2> points) : points_(std::move(points)) {
  if (points_.empty()) throw DomainError("point set is empty");
  Vec2 lo = points_.front();
  Vec2 hi = points_.front();
  for (const Vec2& p : points_) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  lo_ = lo;
  const double w = hi.x - lo.x;
  const double h = hi.y - lo.y;
  const double area = std::max(w * h, 1e-300);
  cell_ = std::sqrt(area / static_cast<double>(points_.size())) * 2.0;
  if (!(cell_ > 0.0)) cell_ = std::max({w, h, 1.0});
  // flat or near-degenerate sets: keep the bucket count bounded
  cell_ = std::max(cell_, std::max(w, h) / static_cast<double>(points_.size()));
  if (!(cell_ > 0.0) || (w == 0.0 && h == 0.0)) cell_ = 1.0;
  cols_ = static_cast<int>(w / cell_) + 1;
  rows_ = static_cast<int>(h / cell_) + 1;

  const std::size_t nb = static_cast<std::size_t>(cols_) * rows_;
  std::vector<std::size_t> bucket(points_.size());
  start_.assign(nb + 1, 0);
  for (std::size_t k = 0; k < points_.size(); ++k) {
    const int c = std::min(static_cast<int>((points_[k].x - lo_.x) / cell_), cols_ - 1);
    const int r = std::min(static_cast<int>((points_[k].y - lo_.y) / cell_), rows_ - 1);
    bucket[k] = static_cast<std::size_t>(r) * cols_ + c;
    ++start_[bucket[k] + 1];
  }
  for (std::size_t b = 0; b < nb; ++b) start_[b + 1] += start_[b];
  items_.resize(points_.size());
  std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
  for (std::size_t k = 0; k < points_.size(); ++k) items_[fill[bucket[k]]++] = k;
}

double PointIndex::nearest_distance(Vec2 q) const {
  // far-away queries are pulled to just outside the array; ring distances
  // then underestimate the true ones, which keeps the pruning valid
  auto bucket_of = [&](double v, int n) {
    return static_cast<int>(std::clamp(std::floor(v / cell_), -1.0 - n, static_cast<double>(n)));
  };
  const int qc = bucket_of(q.x - lo_.x, cols_);
  const int qr = bucket_of(q.y - lo_.y, rows_);
  // Chebyshev bucket distance from q to the bucket array
  const int dc = std::max({0, -qc, qc - (cols_ - 1)});
  const int dr = std::max({0, -qr, qr - (rows_ - 1)});
  double best = std::numeric_limits<double>::infinity();
  const int max_ring = std::max(dc, dr) + cols_ + rows_;
  auto scan = [&](int r, int c) {
    const std::size_t b = static_cast<std::size_t>(r) * cols_ + c;
    for (std::size_t t = start_[b]; t < start_[b + 1]; ++t) best = std::min(best, distance(q, points_[items_[t]]));
  };
  for (int ring = std::max(dc, dr); ring <= max_ring; ++ring) {
    // every point in a bucket of this ring is at least (ring-1)*cell away
    if (ring >= 1 && (ring - 1) * cell_ > best) break;
    const int r_lo = std::max(qr - ring, 0);
    const int r_hi = std::min(qr + ring, rows_ - 1);
    const int c_lo = std::max(qc - ring, 0);
    const int c_hi = std::min(qc + ring, cols_ - 1);
    for (int r = r_lo; r <= r_hi; ++r) {
      if (r == qr - ring || r == qr + ring) {
        for (int c = c_lo; c <= c_hi; ++c) scan(r, c);
      } else {
        if (qc - ring >= 0 && qc - ring < cols_) scan(r, qc - ring);
        if (ring > 0 && qc + ring >= 0 && qc + ring < cols_) scan(r, qc + ring);
      }
    }
  }
  return best;
}

}  // namespace steiner
