#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "autostroke/geometry.hpp"
#include "autostroke/stroke.hpp"

namespace autostroke {

/// Discrete Fréchet distance (coupling DP). Both inputs must be non-empty.
inline double frechet_distance(std::span<const Vec2> a, std::span<const Vec2> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::invalid_argument, "Fréchet distance of an empty polyline");
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<double> prev(m), cur(m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double d = distance(a[i], b[j]);
      if (i == 0 && j == 0) cur[j] = d;
      else if (i == 0) cur[j] = std::max(cur[j - 1], d);
      else if (j == 0) cur[j] = std::max(prev[j], d);
      else cur[j] = std::max(std::min({prev[j], prev[j - 1], cur[j - 1]}), d);
    }
    std::swap(prev, cur);
  }
  return prev[m - 1];
}

/// `count` points spaced evenly by arc length along the stroke polyline.
inline std::vector<Vec2> resample(const Stroke& stroke, int count = 16) {
  std::vector<Vec2> pts;
  pts.reserve(stroke.points.size());
  for (const auto& p : stroke.points) pts.push_back(p.position());
  std::vector<double> cum(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) cum[i] = cum[i - 1] + distance(pts[i - 1], pts[i]);
  const double total = cum.empty() ? 0.0 : cum.back();
  std::vector<Vec2> out;
  out.reserve(count);
  if (pts.empty()) return out;
  std::size_t seg = 0;
  for (int k = 0; k < count; ++k) {
    const double target = count == 1 ? 0.0 : total * k / (count - 1);
    while (seg + 1 < pts.size() - 1 && cum[seg + 1] < target) ++seg;
    if (pts.size() == 1 || total <= 0.0) {
      out.push_back(pts.front());
      continue;
    }
    const double seg_len = cum[seg + 1] - cum[seg];
    const double t = seg_len > 0.0 ? std::clamp((target - cum[seg]) / seg_len, 0.0, 1.0) : 0.0;
    out.push_back(pts[seg] + (pts[seg + 1] - pts[seg]) * t);
  }
  return out;
}

inline double polyline_length(std::span<const Vec2> pts) {
  double len = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) len += distance(pts[i - 1], pts[i]);
  return len;
}

/// Translates the polyline so its centroid sits at the origin.
inline void center_at_origin(std::vector<Vec2>& pts) {
  Vec2 c;
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  for (auto& p : pts) p -= c;
}

/// Shape test used for grouping: resample to 16 points, align centroids,
/// then compare the Fréchet distance against a fraction of the longer length.
inline bool shape_similar(const Stroke& a, const Stroke& b, double rel_threshold) {
  auto ra = resample(a);
  auto rb = resample(b);
  center_at_origin(ra);
  center_at_origin(rb);
  const double bound = rel_threshold * std::max(polyline_length(ra), polyline_length(rb));
  return frechet_distance(ra, rb) <= bound + 1e-12;
}

}  // namespace autostroke
