#pragma once

#include <cmath>

#include "autostroke/geometry.hpp"
#include "autostroke/image.hpp"
#include "autostroke/raster.hpp"

namespace autostroke {

/// Per-pixel unit tangents, or the global default frame when the image has
/// no edges at all.
struct FlowField {
  bool global = true;
  Raster<Vec2> tangents;     // empty when global
  Raster<double> magnitude;  // gradient magnitude driving the smoothing weights

  int width() const { return tangents.width(); }
  int height() const { return tangents.height(); }

  /// Tangent at canvas point p; +x when global.
  Vec2 at(Vec2 p) const {
    if (global || tangents.empty()) return {1.0, 0.0};
    const int x = std::clamp(static_cast<int>(std::floor(p.x)), 0, tangents.width() - 1);
    const int y = std::clamp(static_cast<int>(std::floor(p.y)), 0, tangents.height() - 1);
    return tangents(x, y);
  }
};

struct EtfOptions {
  int iterations = 3;
  int radius = 5;
};

namespace detail {

/// One coherent-line-drawing smoothing pass restricted to pixels where
/// `active` is set (all pixels when null).
inline Raster<Vec2> etf_pass(const Raster<Vec2>& t, const Raster<double>& mag, int radius,
                             const Raster<std::uint8_t>* active = nullptr) {
  const int w = t.width();
  const int h = t.height();
  Raster<Vec2> out = t;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (active && !(*active)(x, y)) continue;
      const Vec2 ti = t(x, y);
      const double gi = mag(x, y);
      Vec2 acc;
      for (int yy = std::max(0, y - radius); yy <= std::min(h - 1, y + radius); ++yy) {
        for (int xx = std::max(0, x - radius); xx <= std::min(w - 1, x + radius); ++xx) {
          const Vec2 tj = t(xx, yy);
          if (tj == Vec2{}) continue;
          const double wm = 0.5 * (1.0 + std::tanh(mag(xx, yy) - gi));
          double d = dot(ti, tj);
          // Pixels with no tangent yet pick up their neighbors unweighted by direction.
          double wd = ti == Vec2{} ? 1.0 : std::abs(d);
          const double sign = d < 0.0 ? -1.0 : 1.0;
          acc += tj * (sign * wm * wd);
        }
      }
      out(x, y) = normalized(acc, 1e-12);
    }
  }
  return out;
}

}  // namespace detail

/// Edge tangent field: gradient rotated by 90 degrees, then smoothed with
/// magnitude- and direction-weighted box averaging.
inline FlowField compute_etf(const ReferenceImage& img, EtfOptions opts = {}) {
  FlowField field;
  Raster<Vec2> grad;
  sobel_magnitude(img.lightness, &grad);
  const int w = img.width();
  const int h = img.height();
  Raster<Vec2> t(w, h);
  bool any = false;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Vec2 g = grad(x, y);
      t(x, y) = normalized(Vec2{-g.y, g.x}, 1e-9);
      any = any || t(x, y) != Vec2{};
    }
  }
  field.magnitude = img.gradient;
  if (!any) {
    field.global = true;
    return field;
  }
  for (int k = 0; k < opts.iterations; ++k) t = detail::etf_pass(t, field.magnitude, opts.radius);
  for (auto& v : t.data())
    if (v == Vec2{}) v = {1.0, 0.0};
  field.global = false;
  field.tangents = std::move(t);
  return field;
}

}  // namespace autostroke
