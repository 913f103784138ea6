#pragma once

#include <cmath>
#include <iomanip>
#include <sstream>
#include <string>

#include "autostroke/png_io.hpp"
#include "autostroke/stroke.hpp"

namespace autostroke {

struct RenderOptions {
  bool provenance = false;  // manual black, autocompleted red
  Rgba background{255, 255, 255, 255};
};

inline Rgba provenance_color(StrokeSource s) {
  return s == StrokeSource::manual ? Rgba{0, 0, 0, 255} : Rgba{255, 0, 0, 255};
}

/// Source-over compositing of one opaque-or-translucent color.
inline void blend(Rgba8& dst, Rgba c) {
  const double a = c.a / 255.0;
  dst[0] = static_cast<std::uint8_t>(std::lround(c.r * a + dst[0] * (1.0 - a)));
  dst[1] = static_cast<std::uint8_t>(std::lround(c.g * a + dst[1] * (1.0 - a)));
  dst[2] = static_cast<std::uint8_t>(std::lround(c.b * a + dst[2] * (1.0 - a)));
  dst[3] = static_cast<std::uint8_t>(std::lround(c.a + dst[3] * (1.0 - a)));
}

/// Paints a pixel when its center is within width/2 of the polyline, which
/// gives round caps and joins. Single-point strokes become discs.
inline void draw_stroke(Raster<Rgba8>& canvas, const Stroke& s, Rgba color) {
  if (s.points.empty()) return;
  const double r = std::max(s.width, 1.0) / 2.0;
  double minx = s.points[0].x, maxx = minx, miny = s.points[0].y, maxy = miny;
  for (const auto& p : s.points) {
    minx = std::min(minx, p.x); maxx = std::max(maxx, p.x);
    miny = std::min(miny, p.y); maxy = std::max(maxy, p.y);
  }
  const int x0 = std::max(0, static_cast<int>(std::floor(minx - r)));
  const int x1 = std::min(canvas.width() - 1, static_cast<int>(std::ceil(maxx + r)));
  const int y0 = std::max(0, static_cast<int>(std::floor(miny - r)));
  const int y1 = std::min(canvas.height() - 1, static_cast<int>(std::ceil(maxy + r)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const Vec2 c{x + 0.5, y + 0.5};
      double d2 = squared_distance(c, s.points[0].position());
      for (std::size_t j = 1; j < s.points.size(); ++j)
        d2 = std::min(d2, squared_distance_to_segment(c, s.points[j - 1].position(), s.points[j].position()));
      if (d2 <= r * r) blend(canvas(x, y), color);
    }
  }
}

inline Raster<Rgba8> render_raster(const Document& doc, int width, int height, const RenderOptions& opts = {}) {
  const Rgba8 bg{opts.background.r, opts.background.g, opts.background.b, opts.background.a};
  Raster<Rgba8> canvas(width, height, bg);
  for (const auto& layer : doc.layers)
    for (const auto& s : layer.strokes) draw_stroke(canvas, s, opts.provenance ? provenance_color(s.source) : s.color);
  return canvas;
}

inline std::string render_svg(const Document& doc, int width, int height, const RenderOptions& opts = {}) {
  std::ostringstream out;
  out << std::setprecision(10);
  auto hex = [](Rgba c) {
    std::ostringstream h;
    h << '#' << std::hex << std::setfill('0') << std::setw(2) << int(c.r) << std::setw(2) << int(c.g) << std::setw(2)
      << int(c.b);
    return h.str();
  };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"" << hex(opts.background) << "\"/>\n";
  for (const auto& layer : doc.layers) {
    out << "<g id=\"layer-" << layer.id << "\">\n";
    for (const auto& s : layer.strokes) {
      if (s.points.empty()) continue;
      const Rgba c = opts.provenance ? provenance_color(s.source) : s.color;
      out << "<polyline data-id=\"" << s.id << "\" data-source=\""
          << (s.source == StrokeSource::manual ? "manual" : "autocompleted") << "\" fill=\"none\" stroke=\"" << hex(c)
          << "\" stroke-opacity=\"" << c.a / 255.0 << "\" stroke-width=\"" << s.width
          << "\" stroke-linecap=\"round\" stroke-linejoin=\"round\" points=\"";
      // a lone point needs a zero-length segment to show a round cap
      const auto& pts = s.points;
      for (std::size_t j = 0; j < pts.size(); ++j) out << (j ? " " : "") << pts[j].x << ',' << pts[j].y;
      if (pts.size() == 1) out << ' ' << pts[0].x << ',' << pts[0].y;
      out << "\"/>\n";
    }
    out << "</g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace autostroke
