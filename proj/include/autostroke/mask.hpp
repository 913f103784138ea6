#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "autostroke/error.hpp"
#include "autostroke/geometry.hpp"
#include "autostroke/raster.hpp"

namespace autostroke {

enum class MaskProvenance { inferred, user_edited };

struct RegionMask {
  Raster<std::uint8_t> pixels;  // 0 or 1
  MaskProvenance provenance = MaskProvenance::inferred;

  RegionMask() = default;
  RegionMask(int w, int h, bool fill = false) : pixels(w, h, fill ? 1 : 0) {}

  int width() const { return pixels.width(); }
  int height() const { return pixels.height(); }
  bool at(int x, int y) const { return pixels.contains(x, y) && pixels(x, y) != 0; }
  bool contains(Vec2 p) const {
    return at(static_cast<int>(std::floor(p.x)), static_cast<int>(std::floor(p.y)));
  }
  void set(int x, int y, bool v) { pixels(x, y) = v ? 1 : 0; }

  std::size_t area() const {
    std::size_t n = 0;
    for (auto v : pixels.data()) n += v != 0;
    return n;
  }
  bool empty() const { return area() == 0; }

  friend bool operator==(const RegionMask&, const RegionMask&) = default;
};

inline double iou(const RegionMask& a, const RegionMask& b) {
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const bool x = a.pixels[i] != 0;
    const bool y = b.pixels[i] != 0;
    inter += x && y;
    uni += x || y;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

inline RegionMask mask_and(const RegionMask& a, const RegionMask& b) {
  if (!a.pixels.same_shape(b.pixels)) throw Error(ErrorCode::dimension_mismatch, "mask sizes differ");
  RegionMask out(a.width(), a.height());
  for (std::size_t i = 0; i < out.pixels.size(); ++i) out.pixels[i] = a.pixels[i] && b.pixels[i];
  return out;
}

/// 4-connected component id per pixel (-1 off the mask); ids follow scan order.
inline Raster<int> component_labels(const RegionMask& m, int* count = nullptr) {
  const int w = m.width();
  const int h = m.height();
  Raster<int> label(w, h, -1);
  int next = 0;
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!m.at(x, y) || label(x, y) >= 0) continue;
      const int id = next++;
      stack.clear();
      stack.emplace_back(x, y);
      label(x, y) = id;
      while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        const int nx[4] = {cx + 1, cx - 1, cx, cx};
        const int ny[4] = {cy, cy, cy + 1, cy - 1};
        for (int k = 0; k < 4; ++k) {
          if (m.at(nx[k], ny[k]) && label(nx[k], ny[k]) < 0) {
            label(nx[k], ny[k]) = id;
            stack.emplace_back(nx[k], ny[k]);
          }
        }
      }
    }
  }
  if (count) *count = next;
  return label;
}

/// 4-connected components; returns one mask per component in scan order.
inline std::vector<RegionMask> connected_components(const RegionMask& m) {
  int count = 0;
  const Raster<int> label = component_labels(m, &count);
  std::vector<RegionMask> comps(count, RegionMask(m.width(), m.height()));
  for (std::size_t i = 0; i < label.size(); ++i)
    if (label[i] >= 0) comps[label[i]].pixels[i] = 1;
  return comps;
}

/// Euclidean distance from p to the nearest pixel center of the mask, or 0
/// when p lies on a mask pixel.
inline double distance_to_mask(const RegionMask& m, Vec2 p) {
  if (m.contains(p)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x)
      if (m.at(x, y)) best = std::min(best, squared_distance(p, Vec2{x + 0.5, y + 0.5}));
  return std::sqrt(best);
}

/// Closed polygon rasterized by pixel-center inclusion (even-odd).
inline RegionMask rasterize_polygon(int w, int h, std::span<const Vec2> poly) {
  RegionMask out(w, h);
  if (poly.size() < 3) return out;
  std::vector<double> xs;
  for (int y = 0; y < h; ++y) {
    const double py = y + 0.5;
    xs.clear();
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
      const Vec2 a = poly[i];
      const Vec2 b = poly[j];
      if ((a.y > py) != (b.y > py)) xs.push_back(a.x + (py - a.y) * (b.x - a.x) / (b.y - a.y));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      // pixel centers x + 0.5 in [xs[k], xs[k+1])
      const int x0 = std::max(0, static_cast<int>(std::ceil(xs[k] - 0.5)));
      const int x1 = std::min(w - 1, static_cast<int>(std::ceil(xs[k + 1] - 0.5)) - 1);
      for (int x = x0; x <= x1; ++x) out.set(x, y, true);
    }
  }
  return out;
}

/// Morphological dilation by a disc of the given radius (pixel-center metric).
inline RegionMask dilate(const RegionMask& m, double radius) {
  if (radius <= 0.0) return m;
  const int r = static_cast<int>(std::floor(radius));
  std::vector<std::pair<int, int>> offsets;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx)
      if (dx * dx + dy * dy <= radius * radius) offsets.emplace_back(dx, dy);
  RegionMask out = m;
  const int w = m.width();
  const int h = m.height();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!m.at(x, y)) continue;
      // interior pixels cannot add anything new
      if (m.at(x + 1, y) && m.at(x - 1, y) && m.at(x, y + 1) && m.at(x, y - 1)) continue;
      for (auto [dx, dy] : offsets)
        if (out.pixels.contains(x + dx, y + dy)) out.set(x + dx, y + dy, true);
    }
  }
  return out;
}

enum class RegionEditOp { create, add, subtract, expand };

/// create/add/subtract take a polygon, expand takes a width in px.
using RegionEditShape = std::variant<std::vector<Vec2>, double>;

inline RegionMask edit_region(const RegionMask& mask, RegionEditOp op, const RegionEditShape& shape) {
  RegionMask out;
  if (op == RegionEditOp::expand) {
    const double* width = std::get_if<double>(&shape);
    if (!width || *width < 0.0) throw Error(ErrorCode::invalid_argument, "expand needs a non-negative width");
    out = dilate(mask, *width);
  } else {
    const auto* poly = std::get_if<std::vector<Vec2>>(&shape);
    if (!poly) throw Error(ErrorCode::invalid_argument, "region edit needs a polygon");
    const RegionMask p = rasterize_polygon(mask.width(), mask.height(), *poly);
    out = RegionMask(mask.width(), mask.height());
    for (std::size_t i = 0; i < out.pixels.size(); ++i) {
      const bool a = mask.pixels[i] != 0;
      const bool b = p.pixels[i] != 0;
      switch (op) {
        case RegionEditOp::create: out.pixels[i] = b; break;
        case RegionEditOp::add: out.pixels[i] = a || b; break;
        case RegionEditOp::subtract: out.pixels[i] = a && !b; break;
        case RegionEditOp::expand: break;
      }
    }
  }
  out.provenance = MaskProvenance::user_edited;
  return out;
}

// ---------------------------------------------------------------------------
// Wire encoding: {"w","h","rle"}. Each row is a sequence of alternating run
// lengths starting with a run of zeros (possibly empty), LEB128 varints,
// rows concatenated, then base64.

inline std::string base64_encode(std::span<const std::uint8_t> bytes) {
  static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  if (i < bytes.size()) {
    std::uint32_t v = bytes[i] << 16;
    if (i + 1 < bytes.size()) v |= bytes[i + 1] << 8;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += i + 1 < bytes.size() ? kAlphabet[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

inline std::vector<std::uint8_t> base64_decode(std::string_view text) {
  auto value = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  if (text.size() % 4 != 0) throw Error(ErrorCode::decode, "base64 length is not a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int v[4];
    int pad = 0;
    for (int k = 0; k < 4; ++k) {
      if (text[i + k] == '=' && i + 4 == text.size() && k >= 2) {
        v[k] = 0;
        ++pad;
      } else {
        v[k] = value(text[i + k]);
        if (v[k] < 0 || pad > 0) throw Error(ErrorCode::decode, "invalid base64 character");
      }
    }
    const std::uint32_t n = (v[0] << 18) | (v[1] << 12) | (v[2] << 6) | v[3];
    out.push_back(static_cast<std::uint8_t>(n >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>((n >> 8) & 0xFF));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(n & 0xFF));
  }
  return out;
}

inline std::string encode_mask_rle(const RegionMask& m) {
  std::vector<std::uint8_t> bytes;
  auto put = [&](std::uint32_t v) {
    do {
      std::uint8_t b = v & 0x7F;
      v >>= 7;
      if (v) b |= 0x80;
      bytes.push_back(b);
    } while (v);
  };
  for (int y = 0; y < m.height(); ++y) {
    bool value = false;
    std::uint32_t run = 0;
    for (int x = 0; x < m.width(); ++x) {
      if (m.at(x, y) == value) {
        ++run;
      } else {
        put(run);
        value = !value;
        run = 1;
      }
    }
    put(run);
  }
  return base64_encode(bytes);
}

inline RegionMask decode_mask_rle(int w, int h, std::string_view rle) {
  if (w <= 0 || h <= 0) throw Error(ErrorCode::decode, "mask dimensions must be positive");
  const auto bytes = base64_decode(rle);
  std::size_t pos = 0;
  auto get = [&]() -> std::uint32_t {
    std::uint32_t v = 0;
    int shift = 0;
    while (true) {
      if (pos >= bytes.size()) throw Error(ErrorCode::decode, "truncated mask RLE");
      const std::uint8_t b = bytes[pos++];
      v |= static_cast<std::uint32_t>(b & 0x7F) << shift;
      if (!(b & 0x80)) break;
      shift += 7;
      if (shift > 28) throw Error(ErrorCode::decode, "mask RLE varint overflow");
    }
    return v;
  };
  RegionMask m(w, h);
  for (int y = 0; y < h; ++y) {
    int x = 0;
    bool value = false;
    while (x < w) {
      const std::uint32_t run = get();
      if (run > static_cast<std::uint32_t>(w - x)) throw Error(ErrorCode::decode, "mask RLE row overflows width");
      for (std::uint32_t k = 0; k < run; ++k) m.set(x++, y, value);
      value = !value;
    }
  }
  if (pos != bytes.size()) throw Error(ErrorCode::decode, "trailing bytes in mask RLE");
  return m;
}

}  // namespace autostroke
