#pragma once

#include <cmath>
#include <map>
#include <queue>
#include <stop_token>
#include <tuple>
#include <vector>

#include "autostroke/exemplar.hpp"
#include "autostroke/gmm.hpp"
#include "autostroke/image.hpp"
#include "autostroke/mask.hpp"
#include "autostroke/maxflow.hpp"

namespace autostroke {

struct GrabCutOptions {
  int components = 5;
  double gamma = 50.0;
  int iterations = 3;
  int border = 2;
  double far_factor = 3.0;
};

namespace detail {

inline void throw_if_cancelled(const std::stop_token& stop) {
  if (stop.stop_requested()) throw Error(ErrorCode::cancelled, "cancelled");
}

/// Pixels of the seed patches around exemplar centroids.
inline RegionMask seed_patches(const ReferenceImage& img, const Exemplar& ex, int patch) {
  RegionMask seeds(img.width(), img.height());
  const int half = patch / 2;
  for (const auto& s : ex.strokes) {
    const auto [cx, cy] = img.pixel_of(summarize(s).centroid);
    for (int y = std::max(0, cy - half); y <= std::min(img.height() - 1, cy + half); ++y)
      for (int x = std::max(0, cx - half); x <= std::min(img.width() - 1, cx + half); ++x) seeds.set(x, y, true);
  }
  return seeds;
}

inline double lab_distance(const Lab& a, const Eigen::Vector3d& b) {
  return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
}

inline double nearest_mean_distance(const ColorGmm& gmm, const Lab& z) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& m : gmm.means()) best = std::min(best, lab_distance(z, m));
  return best;
}

/// Flood fill from the exemplar centroids over pixels whose Lab lies within
/// `tolerance` of the exemplar mean color.
inline RegionMask flood_fill_region(const ReferenceImage& img, const Exemplar& ex, double tolerance, int patch) {
  Lab mean{0, 0, 0};
  for (const auto& s : ex.strokes) {
    const Lab f = patch_feature(img, summarize(s).centroid, patch);
    for (int c = 0; c < 3; ++c) mean[c] += f[c];
  }
  for (auto& c : mean) c /= static_cast<double>(ex.strokes.size());
  RegionMask out(img.width(), img.height());
  std::vector<std::pair<int, int>> stack;
  auto ok = [&](int x, int y) {
    return img.rgb.contains(x, y) && !out.at(x, y) && std::sqrt(feature_distance(img.lab(x, y), mean)) <= tolerance;
  };
  for (const auto& s : ex.strokes) {
    const auto [cx, cy] = img.pixel_of(summarize(s).centroid);
    if (ok(cx, cy)) { out.set(cx, cy, true); stack.emplace_back(cx, cy); }
  }
  while (!stack.empty()) {
    auto [x, y] = stack.back();
    stack.pop_back();
    const int nx[4] = {x + 1, x - 1, x, x};
    const int ny[4] = {y, y, y + 1, y - 1};
    for (int k = 0; k < 4; ++k)
      if (ok(nx[k], ny[k])) { out.set(nx[k], ny[k], true); stack.emplace_back(nx[k], ny[k]); }
  }
  return out;
}

}  // namespace detail

/// GrabCut-style color segmentation seeded by the exemplar.
///
/// Seed patches around exemplar centroids are hard foreground. Pixels farther
/// than `far_factor` times the mean seed spread from every foreground mean are
/// hard background; the image border starts as background but may flip. The
/// color models and a 4-connected min cut are alternated `iterations` times.
inline RegionMask color_region(const ReferenceImage& img, const Exemplar& ex, const GroupingParams& params,
                               GrabCutOptions opts = {}, std::stop_token stop = {}) {
  const int w = img.width();
  const int h = img.height();
  const std::size_t n = static_cast<std::size_t>(w) * h;
  const RegionMask seeds = detail::seed_patches(img, ex, params.feature_patch);

  std::vector<Lab> seed_colors;
  for (std::size_t i = 0; i < n; ++i)
    if (seeds.pixels[i]) seed_colors.push_back(img.lab[i]);
  ColorGmm fg(opts.components);
  fg.fit_kmeans(seed_colors);

  double spread = 0.0;
  for (const auto& z : seed_colors) spread += detail::nearest_mean_distance(fg, z);
  spread /= std::max<std::size_t>(1, seed_colors.size());
  const double far_threshold = opts.far_factor * std::max(spread, params.color_std_threshold);

  enum : std::uint8_t { kUnknown = 0, kHardFg = 1, kHardBg = 2 };
  std::vector<std::uint8_t> hard(n, kUnknown);
  std::vector<std::uint8_t> fg_label(n, 1);
  bool any_far = false;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = img.lab.index(x, y);
      if (seeds.pixels[i]) {
        hard[i] = kHardFg;
        continue;
      }
      if (detail::nearest_mean_distance(fg, img.lab[i]) > far_threshold) {
        hard[i] = kHardBg;
        fg_label[i] = 0;
        any_far = true;
      } else if (x < opts.border || y < opts.border || x >= w - opts.border || y >= h - opts.border) {
        fg_label[i] = 0;
      }
    }
  }
  // Nothing in the image is dissimilar to the exemplar color.
  if (!any_far) return RegionMask(w, h, true);

  // beta = 1 / (2 <|z_m - z_n|^2>) over 4-neighbors
  double sum_sq = 0.0;
  std::size_t pairs = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (x + 1 < w) { sum_sq += feature_distance(img.lab(x, y), img.lab(x + 1, y)); ++pairs; }
      if (y + 1 < h) { sum_sq += feature_distance(img.lab(x, y), img.lab(x, y + 1)); ++pairs; }
    }
  }
  const double mean_sq = pairs ? sum_sq / pairs : 0.0;
  const double beta = mean_sq > 0.0 ? 1.0 / (2.0 * mean_sq) : 0.0;
  const double hard_cap = 1e9;

  ColorGmm bg(opts.components);
  for (int it = 0; it < opts.iterations; ++it) {
    detail::throw_if_cancelled(stop);
    std::vector<Lab> fg_samples, bg_samples;
    for (std::size_t i = 0; i < n; ++i) (fg_label[i] ? fg_samples : bg_samples).push_back(img.lab[i]);
    if (it == 0) {
      bg.fit_kmeans(bg_samples);
    } else {
      fg.refit(fg_samples);
      if (!bg_samples.empty()) bg.refit(bg_samples);
    }

    MinCutGraph graph(static_cast<int>(n));
    for (std::size_t i = 0; i < n; ++i) {
      if (hard[i] == kHardFg) {
        graph.add_terminal(static_cast<int>(i), hard_cap, 0.0);
      } else if (hard[i] == kHardBg) {
        graph.add_terminal(static_cast<int>(i), 0.0, hard_cap);
      } else {
        const double cost_fg = fg.neg_log_likelihood(img.lab[i]);
        const double cost_bg = bg.trained() ? bg.neg_log_likelihood(img.lab[i]) : 0.0;
        const double base = std::min(cost_fg, cost_bg);
        // source side = foreground: cutting the source link pays the bg cost
        graph.add_terminal(static_cast<int>(i), cost_bg - base, cost_fg - base);
      }
    }
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const int i = static_cast<int>(img.lab.index(x, y));
        if (x + 1 < w) {
          const double v = opts.gamma * std::exp(-beta * feature_distance(img.lab(x, y), img.lab(x + 1, y)));
          graph.add_edge(i, i + 1, v, v);
        }
        if (y + 1 < h) {
          const double v = opts.gamma * std::exp(-beta * feature_distance(img.lab(x, y), img.lab(x, y + 1)));
          graph.add_edge(i, i + w, v, v);
        }
      }
    }
    graph.solve();
    for (std::size_t i = 0; i < n; ++i) fg_label[i] = graph.source_side(static_cast<int>(i)) ? 1 : 0;
  }

  RegionMask out(w, h);
  for (std::size_t i = 0; i < n; ++i) out.pixels[i] = fg_label[i];
  if (out.empty())
    out = detail::flood_fill_region(img, ex, 3.0 * params.color_std_threshold, params.feature_patch);
  return out;
}

/// Pixels sharing the most common label among exemplar centroids (ties go
/// to the smaller id).
inline RegionMask semantic_region(const ReferenceImage& img, const Exemplar& ex) {
  if (!img.labels) throw Error(ErrorCode::labels_absent, "semantic region needs a label map");
  std::map<int, int> votes;
  for (const auto& s : ex.strokes) ++votes[*img.label_at(summarize(s).centroid)];
  int mode = 0;
  int best = -1;
  for (auto [label, count] : votes)
    if (count > best) { best = count; mode = label; }
  RegionMask out(img.width(), img.height());
  for (std::size_t i = 0; i < out.pixels.size(); ++i) out.pixels[i] = (*img.labels)[i] == mode;
  return out;
}

/// Keeps the 4-connected component nearest to `anchor` (0 when inside).
inline RegionMask nearest_component(const RegionMask& mask, Vec2 anchor) {
  int count = 0;
  const Raster<int> labels = component_labels(mask, &count);
  if (count == 0) throw Error(ErrorCode::no_region, "inferred region is empty");
  std::vector<double> best(count, std::numeric_limits<double>::infinity());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      const int id = labels(x, y);
      if (id < 0) continue;
      const bool inside = std::floor(anchor.x) == x && std::floor(anchor.y) == y;
      const double d = inside ? 0.0 : distance(anchor, Vec2{x + 0.5, y + 0.5});
      best[id] = std::min(best[id], d);
    }
  }
  const int keep = static_cast<int>(std::min_element(best.begin(), best.end()) - best.begin());
  RegionMask out(mask.width(), mask.height());
  for (std::size_t i = 0; i < out.pixels.size(); ++i) out.pixels[i] = labels[i] == keep;
  out.provenance = MaskProvenance::inferred;
  return out;
}

/// Output region from the exemplar's shared features: color via GrabCut,
/// semantic via the label map, AND of both, then the component nearest to
/// the last stroke.
inline RegionMask infer_region(const ReferenceImage& img, const Exemplar& ex, const Stroke& last_stroke,
                               const GroupingParams& params, std::stop_token stop = {}) {
  const bool use_color = ex.shared_features.has(Feature::color);
  const bool use_semantic = ex.shared_features.has(Feature::semantic) && img.has_labels();
  if (!use_color && !use_semantic) throw Error(ErrorCode::no_region, "exemplar shares no usable feature");
  RegionMask combined;
  if (use_color) combined = color_region(img, ex, params, {}, stop);
  if (use_semantic) {
    const RegionMask sem = semantic_region(img, ex);
    combined = use_color ? mask_and(combined, sem) : sem;
  }
  return nearest_component(combined, summarize(last_stroke).centroid);
}

/// Minimum-cost 8-connected pixel path for the intelligent-scissors tool.
/// Stepping into pixel q costs (1 - gradient(q)) + 0.1 * step length.
/// Points are pixel centers, anchor first.
inline std::vector<Vec2> livewire_path(const ReferenceImage& img, Vec2 anchor, Vec2 cursor) {
  const auto [ax, ay] = img.pixel_of(anchor);
  const auto [cx, cy] = img.pixel_of(cursor);
  const int w = img.width();
  const int h = img.height();
  if (ax == cx && ay == cy) return {Vec2{ax + 0.5, ay + 0.5}};
  std::vector<double> dist(static_cast<std::size_t>(w) * h, std::numeric_limits<double>::infinity());
  std::vector<int> prev(dist.size(), -1);
  using Entry = std::tuple<double, int, int>;  // cost, y, x: ties resolve in (y, x) order
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  const std::size_t start = img.lab.index(ax, ay);
  const std::size_t goal = img.lab.index(cx, cy);
  dist[start] = 0.0;
  open.emplace(0.0, ay, ax);
  while (!open.empty()) {
    auto [d, y, x] = open.top();
    open.pop();
    const std::size_t i = img.lab.index(x, y);
    if (d > dist[i]) continue;
    if (i == goal) break;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const int nx = x + dx;
        const int ny = y + dy;
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const double step = (dx != 0 && dy != 0) ? std::sqrt(2.0) : 1.0;
        const double nd = d + (1.0 - img.gradient(nx, ny)) + 0.1 * step;
        const std::size_t j = img.lab.index(nx, ny);
        if (nd < dist[j]) {
          dist[j] = nd;
          prev[j] = static_cast<int>(i);
          open.emplace(nd, ny, nx);
        }
      }
    }
  }
  std::vector<Vec2> path;
  for (int i = static_cast<int>(goal); i >= 0; i = prev[i]) {
    path.push_back(Vec2{i % w + 0.5, static_cast<double>(i / w) + 0.5});
    if (static_cast<std::size_t>(i) == start) break;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace autostroke
