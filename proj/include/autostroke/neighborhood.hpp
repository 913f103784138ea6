#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <limits>
#include <vector>

#include "autostroke/geometry.hpp"
#include "autostroke/hungarian.hpp"
#include "autostroke/stroke.hpp"

namespace autostroke {

/// Uniform bucket grid over a fixed point set for radius and nearest queries.
class PointGrid {
 public:
  PointGrid(std::span<const Vec2> points, double cell) : points_(points.begin(), points.end()), cell_(std::max(cell, 1e-6)) {
    if (points_.empty()) return;
    Vec2 lo = points_.front(), hi = points_.front();
    for (const auto& p : points_) {
      lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
      hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    origin_ = lo;
    nx_ = static_cast<int>(std::floor((hi.x - lo.x) / cell_)) + 1;
    ny_ = static_cast<int>(std::floor((hi.y - lo.y) / cell_)) + 1;
    start_.assign(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
    std::vector<std::size_t> cell_index(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const auto [cx, cy] = cell_of(points_[i]);
      cell_index[i] = static_cast<std::size_t>(cy) * nx_ + cx;
      ++start_[cell_index[i] + 1];
    }
    for (std::size_t c = 1; c < start_.size(); ++c) start_[c] += start_[c - 1];
    items_.resize(points_.size());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < points_.size(); ++i) items_[fill[cell_index[i]]++] = static_cast<int>(i);
  }

  std::size_t size() const { return points_.size(); }
  const Vec2& point(int i) const { return points_[i]; }

  /// Indices of points with |p - center| < radius, ascending.
  std::vector<int> within(Vec2 center, double radius) const {
    std::vector<int> out;
    if (points_.empty()) return out;
    const auto [cx0, cy0] = cell_of(center - Vec2{radius, radius});
    const auto [cx1, cy1] = cell_of(center + Vec2{radius, radius});
    for (long long cy = std::max(0LL, cy0); cy <= std::min<long long>(ny_ - 1, cy1); ++cy)
      for (long long cx = std::max(0LL, cx0); cx <= std::min<long long>(nx_ - 1, cx1); ++cx)
        for (int i : bucket(cx, cy))
          if (squared_distance(points_[i], center) < radius * radius) out.push_back(i);
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Index of the nearest point (lowest index on ties), or -1 when empty.
  int nearest(Vec2 q) const {
    if (points_.empty()) return -1;
    const auto [qx, qy] = cell_of(q);
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    const long long max_ring = std::max<long long>({std::llabs(qx), std::llabs(qy), std::llabs(qx - nx_), std::llabs(qy - ny_)}) + 1;
    for (long long ring = 0; ring <= max_ring; ++ring) {
      // a point in ring r is at least (r - 1) * cell away from q
      const double ring_min = (static_cast<double>(ring) - 1.0) * cell_;
      if (best >= 0 && ring_min > 0 && ring_min * ring_min > best_d) break;
      for (long long cy = qy - ring; cy <= qy + ring; ++cy) {
        if (cy < 0 || cy >= ny_) continue;
        const bool edge_row = cy == qy - ring || cy == qy + ring;
        for (long long cx = qx - ring; cx <= qx + ring; cx += edge_row ? 1 : 2 * std::max(ring, 1LL)) {
          if (cx < 0 || cx >= nx_) continue;
          for (int i : bucket(cx, cy)) {
            const double d = squared_distance(points_[i], q);
            if (d < best_d || (d == best_d && i < best)) { best_d = d; best = i; }
          }
        }
      }
    }
    return best;
  }

 private:
  std::pair<long long, long long> cell_of(Vec2 p) const {
    return {static_cast<long long>(std::floor((p.x - origin_.x) / cell_)),
            static_cast<long long>(std::floor((p.y - origin_.y) / cell_))};
  }
  std::span<const int> bucket(long long cx, long long cy) const {
    const std::size_t c = static_cast<std::size_t>(cy) * nx_ + static_cast<std::size_t>(cx);
    return {items_.data() + start_[c], items_.data() + start_[c + 1]};
  }

  std::vector<Vec2> points_;
  double cell_;
  Vec2 origin_;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<std::size_t> start_;
  std::vector<int> items_;
};

/// Offset of one neighbor relative to the center stroke, in the center's
/// local frame: position scaled by 1/R(center), direction difference.
struct NeighborEntry {
  int neighbor = -1;  // index into the stroke list the descriptor was built from
  int quadrant = 0;
  Vec2 position;
  Vec2 direction;
};

struct NeighborhoodDescriptor {
  int center = -1;
  std::vector<NeighborEntry> entries;
};

/// Quadrant of a local-frame offset: 0 (+x,+y), 1 (-x,+y), 2 (-x,-y), 3 (+x,-y).
inline int quadrant_of(Vec2 local) {
  if (local.x >= 0) return local.y >= 0 ? 0 : 3;
  return local.y >= 0 ? 1 : 2;
}

/// Up to `n` nearest strokes per quadrant of the center's frame among those
/// whose centroid lies within 2 R(center). `candidates` lists the indices to
/// consider.
inline NeighborhoodDescriptor build_neighborhood(int center, std::span<const StrokeSummary> strokes,
                                                 std::span<const int> candidates, Rotation frame, double radius,
                                                 int n) {
  NeighborhoodDescriptor desc;
  desc.center = center;
  const StrokeSummary& c = strokes[center];
  struct Cand { double d2; int idx; NeighborEntry e; };
  std::array<std::vector<Cand>, 4> per_quadrant;
  const double reach = 2.0 * radius;
  for (int idx : candidates) {
    if (idx == center) continue;
    const StrokeSummary& s = strokes[idx];
    const double d2 = squared_distance(s.centroid, c.centroid);
    if (d2 >= reach * reach) continue;
    NeighborEntry e;
    e.neighbor = idx;
    const Vec2 local = frame.apply_inverse(s.centroid - c.centroid);
    e.quadrant = quadrant_of(local);
    e.position = local / radius;
    e.direction = frame.apply_inverse(s.direction - c.direction);
    per_quadrant[e.quadrant].push_back({d2, idx, e});
  }
  for (auto& q : per_quadrant) {
    std::sort(q.begin(), q.end(), [](const Cand& a, const Cand& b) { return a.d2 != b.d2 ? a.d2 < b.d2 : a.idx < b.idx; });
    for (int k = 0; k < n && k < static_cast<int>(q.size()); ++k) desc.entries.push_back(q[k].e);
  }
  return desc;
}

/// Convenience overload considering every stroke.
inline NeighborhoodDescriptor build_neighborhood(int center, std::span<const StrokeSummary> strokes, Rotation frame,
                                                 double radius, int n) {
  std::vector<int> all(strokes.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return build_neighborhood(center, strokes, all, frame, radius, n);
}

inline double entry_distance(const NeighborEntry& a, const NeighborEntry& b) {
  return squared_distance(a.position, b.position) + squared_distance(a.direction, b.direction);
}

struct NeighborhoodMatch {
  double cost = 0.0;
  std::vector<int> pairing;  // out entry -> in entry, -1 when unmatched
};

/// Min-cost bipartite matching of output entries to input entries plus the
/// image term: cost = matched sum + penalty per unmatched output entry + mu * d_I.
inline NeighborhoodMatch neighborhood_distance(const NeighborhoodDescriptor& out_desc,
                                               const NeighborhoodDescriptor& in_desc, double d_image, double mu,
                                               double unmatched_penalty = 4.0) {
  NeighborhoodMatch m;
  const int rows = static_cast<int>(out_desc.entries.size());
  const int cols = static_cast<int>(in_desc.entries.size());
  std::vector<double> cost(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) cost[static_cast<std::size_t>(r) * cols + c] = entry_distance(out_desc.entries[r], in_desc.entries[c]);
  const Assignment a = solve_assignment(cost, rows, cols);
  m.pairing = a.row_to_col;
  m.cost = a.cost;
  for (int r = 0; r < rows; ++r)
    if (m.pairing[r] < 0) m.cost += unmatched_penalty;
  m.cost += mu * d_image;
  return m;
}

}  // namespace autostroke
