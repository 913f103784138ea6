#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "autostroke/error.hpp"
#include "autostroke/geometry.hpp"
#include "autostroke/params.hpp"

namespace autostroke {

using StrokeId = std::uint64_t;
using LayerId = std::uint64_t;

struct StrokePoint {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;         // ms since session start
  double pressure = 1.0;  // [0, 1]

  Vec2 position() const { return {x, y}; }
  friend bool operator==(const StrokePoint&, const StrokePoint&) = default;
};

struct Rgba {
  std::uint8_t r = 0, g = 0, b = 0, a = 255;
  friend bool operator==(const Rgba&, const Rgba&) = default;
};

enum class StrokeSource { manual, autocompleted };

struct Stroke {
  StrokeId id = 0;
  std::vector<StrokePoint> points;
  double width = 2.0;
  Rgba color{};
  StrokeSource source = StrokeSource::manual;
  // Suggestion set an autocompleted stroke came from.
  std::optional<std::uint64_t> suggestion;

  double start_time() const { return points.empty() ? 0.0 : points.front().t; }
  double end_time() const { return points.empty() ? 0.0 : points.back().t; }
  friend bool operator==(const Stroke&, const Stroke&) = default;
};

/// Centroid and dominant direction of a stroke.
struct StrokeSummary {
  Vec2 centroid;
  Vec2 direction;  // unit, or zero for dots
  friend bool operator==(const StrokeSummary&, const StrokeSummary&) = default;
};

/// Centroid = mean of the points. Direction = normalized sum of the vectors
/// from the first point to every later point, so drawing order matters.
inline StrokeSummary summarize(const Stroke& stroke) {
  StrokeSummary out;
  if (stroke.points.empty()) return out;
  const Vec2 first = stroke.points.front().position();
  Vec2 sum_pos;
  Vec2 sum_dir;
  for (std::size_t j = 0; j < stroke.points.size(); ++j) {
    const Vec2 p = stroke.points[j].position();
    sum_pos += p;
    if (j > 0) sum_dir += p - first;
  }
  out.centroid = sum_pos / static_cast<double>(stroke.points.size());
  out.direction = normalized(sum_dir);
  return out;
}

/// Rigidly moves `stroke` so that its summary becomes `target`. Dots, or a
/// zero target direction, translate only.
inline Stroke reconstruct(const Stroke& stroke, const StrokeSummary& target) {
  const StrokeSummary current = summarize(stroke);
  const Rotation rot = Rotation::between(current.direction, target.direction);
  Stroke out = stroke;
  for (auto& pt : out.points) {
    const Vec2 q = target.centroid + rot.apply(pt.position() - current.centroid);
    pt.x = q.x;
    pt.y = q.y;
  }
  return out;
}

/// Arc length of the polyline.
inline double arc_length(const Stroke& stroke) {
  double len = 0.0;
  for (std::size_t j = 1; j < stroke.points.size(); ++j)
    len += distance(stroke.points[j - 1].position(), stroke.points[j].position());
  return len;
}

inline void validate(const Stroke& stroke) {
  if (stroke.points.empty()) throw Error(ErrorCode::invalid_argument, "stroke has no points");
  if (!(stroke.width > 0.0)) throw Error(ErrorCode::invalid_argument, "stroke width must be positive");
  double last_t = -std::numeric_limits<double>::infinity();
  for (const auto& p : stroke.points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw Error(ErrorCode::invalid_argument, "stroke point is not finite");
    if (p.t < last_t) throw Error(ErrorCode::invalid_argument, "stroke timestamps decrease");
    last_t = p.t;
  }
}

struct Layer {
  LayerId id = 0;
  std::string name;
  std::vector<Stroke> strokes;
  friend bool operator==(const Layer&, const Layer&) = default;
};

struct Document {
  int version = 1;
  std::string image;
  std::optional<std::string> labels;
  std::vector<Layer> layers;
  Params params;

  friend bool operator==(const Document&, const Document&) = default;

  Layer* find_layer(LayerId id) {
    auto it = std::find_if(layers.begin(), layers.end(), [&](const Layer& l) { return l.id == id; });
    return it == layers.end() ? nullptr : &*it;
  }
  const Layer* find_layer(LayerId id) const {
    return const_cast<Document*>(this)->find_layer(id);
  }

  Stroke* find_stroke(StrokeId id) {
    for (auto& layer : layers)
      for (auto& s : layer.strokes)
        if (s.id == id) return &s;
    return nullptr;
  }
  const Stroke* find_stroke(StrokeId id) const { return const_cast<Document*>(this)->find_stroke(id); }

  StrokeId next_stroke_id() const {
    StrokeId next = 1;
    for (const auto& layer : layers)
      for (const auto& s : layer.strokes) next = std::max(next, s.id + 1);
    return next;
  }

  LayerId next_layer_id() const {
    LayerId next = 1;
    for (const auto& layer : layers) next = std::max(next, layer.id + 1);
    return next;
  }

  double max_time() const {
    double t = 0.0;
    for (const auto& layer : layers)
      for (const auto& s : layer.strokes)
        if (!s.points.empty()) t = std::max(t, s.points.back().t);
    return t;
  }

  std::size_t stroke_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers) n += layer.strokes.size();
    return n;
  }
};

/// Throws when layer ids or stroke ids collide, or a stroke is malformed.
inline void validate(const Document& doc) {
  std::vector<LayerId> layer_ids;
  std::vector<StrokeId> stroke_ids;
  for (const auto& layer : doc.layers) {
    layer_ids.push_back(layer.id);
    for (const auto& s : layer.strokes) {
      validate(s);
      stroke_ids.push_back(s.id);
    }
  }
  auto has_dupes = [](auto ids) {
    std::sort(ids.begin(), ids.end());
    return std::adjacent_find(ids.begin(), ids.end()) != ids.end();
  };
  if (has_dupes(layer_ids)) throw Error(ErrorCode::invalid_argument, "duplicate layer id");
  if (has_dupes(stroke_ids)) throw Error(ErrorCode::invalid_argument, "duplicate stroke id");
}

}  // namespace autostroke
