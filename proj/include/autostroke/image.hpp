#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "autostroke/error.hpp"
#include "autostroke/geometry.hpp"
#include "autostroke/png_io.hpp"
#include "autostroke/raster.hpp"

namespace autostroke {

/// CIELAB with L/100, (a+128)/255, (b+128)/255, each clamped to [0, 1].
using Lab = std::array<double, 3>;
using Rgb8 = std::array<std::uint8_t, 3>;

namespace detail {

inline double srgb_to_linear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

inline double lab_f(double t) {
  constexpr double delta = 6.0 / 29.0;
  return t > delta * delta * delta ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

}  // namespace detail

/// D65 sRGB -> normalized CIELAB.
inline Lab rgb_to_lab(Rgb8 rgb) {
  const double r = detail::srgb_to_linear(rgb[0] / 255.0);
  const double g = detail::srgb_to_linear(rgb[1] / 255.0);
  const double b = detail::srgb_to_linear(rgb[2] / 255.0);
  const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
  const double fx = detail::lab_f(x / 0.95047);
  const double fy = detail::lab_f(y / 1.0);
  const double fz = detail::lab_f(z / 1.08883);
  const double L = 116.0 * fy - 16.0;
  const double A = 500.0 * (fx - fy);
  const double B = 200.0 * (fy - fz);
  return {std::clamp(L / 100.0, 0.0, 1.0), std::clamp((A + 128.0) / 255.0, 0.0, 1.0),
          std::clamp((B + 128.0) / 255.0, 0.0, 1.0)};
}

/// Reference raster plus every per-pixel field derived from it.
struct ReferenceImage {
  Raster<Rgb8> rgb;
  Raster<Lab> lab;
  Raster<double> lightness;  // == L channel of lab
  Raster<double> gradient;   // Sobel magnitude of lightness, [0, 1]
  std::optional<Raster<int>> labels;

  int width() const { return rgb.width(); }
  int height() const { return rgb.height(); }
  bool has_labels() const { return labels.has_value(); }
  bool contains(Vec2 p) const { return p.x >= 0 && p.y >= 0 && p.x < width() && p.y < height(); }

  /// Pixel holding canvas point p, clamped into the image.
  std::pair<int, int> pixel_of(Vec2 p) const {
    return {std::clamp(static_cast<int>(std::floor(p.x)), 0, width() - 1),
            std::clamp(static_cast<int>(std::floor(p.y)), 0, height() - 1)};
  }

  double lightness_at(Vec2 p) const { auto [x, y] = pixel_of(p); return lightness(x, y); }
  double gradient_at(Vec2 p) const { auto [x, y] = pixel_of(p); return gradient(x, y); }
  std::optional<int> label_at(Vec2 p) const {
    if (!labels) return std::nullopt;
    auto [x, y] = pixel_of(p);
    return (*labels)(x, y);
  }
};

/// Unnormalized 3x3 Sobel on a scalar field in [0, 1], scaled so that its
/// largest possible response is 1. Borders replicate.
inline Raster<double> sobel_magnitude(const Raster<double>& f, Raster<Vec2>* gradient_vectors = nullptr) {
  const int w = f.width();
  const int h = f.height();
  Raster<double> mag(w, h, 0.0);
  if (gradient_vectors) *gradient_vectors = Raster<Vec2>(w, h);
  const double scale = 1.0 / (4.0 * std::sqrt(2.0));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      auto v = [&](int dx, int dy) { return f.clamped(x + dx, y + dy); };
      const double gx = (v(1, -1) + 2 * v(1, 0) + v(1, 1)) - (v(-1, -1) + 2 * v(-1, 0) + v(-1, 1));
      const double gy = (v(-1, 1) + 2 * v(0, 1) + v(1, 1)) - (v(-1, -1) + 2 * v(0, -1) + v(1, -1));
      mag(x, y) = std::min(1.0, std::hypot(gx, gy) * scale);
      if (gradient_vectors) (*gradient_vectors)(x, y) = {gx * scale, gy * scale};
    }
  }
  return mag;
}

/// Builds every derived field from an RGB raster.
inline ReferenceImage make_reference(Raster<Rgb8> rgb, std::optional<Raster<int>> labels = std::nullopt) {
  if (rgb.width() <= 0 || rgb.height() <= 0) throw Error(ErrorCode::decode, "reference image is empty");
  if (labels && !labels->same_shape(rgb))
    throw Error(ErrorCode::dimension_mismatch, "label map size differs from reference image");
  ReferenceImage img;
  img.lab = Raster<Lab>(rgb.width(), rgb.height());
  img.lightness = Raster<double>(rgb.width(), rgb.height());
  for (std::size_t i = 0; i < rgb.size(); ++i) {
    img.lab[i] = rgb_to_lab(rgb[i]);
    img.lightness[i] = img.lab[i][0];
  }
  img.gradient = sobel_magnitude(img.lightness);
  img.rgb = std::move(rgb);
  img.labels = std::move(labels);
  return img;
}

/// Reads the reference PNG and an optional label PNG (class id in red).
inline ReferenceImage load_reference(const std::string& image_path,
                                     const std::optional<std::string>& label_path = std::nullopt) {
  const Raster<Rgba8> src = read_png(image_path);
  Raster<Rgb8> rgb(src.width(), src.height());
  for (std::size_t i = 0; i < src.size(); ++i) rgb[i] = {src[i][0], src[i][1], src[i][2]};
  std::optional<Raster<int>> labels;
  if (label_path) {
    const Raster<Rgba8> lab_src = read_png(*label_path);
    if (!lab_src.same_shape(src))
      throw Error(ErrorCode::dimension_mismatch, "label map '" + *label_path + "' size differs from reference image");
    labels = Raster<int>(src.width(), src.height());
    for (std::size_t i = 0; i < lab_src.size(); ++i) (*labels)[i] = lab_src[i][0];
  }
  return make_reference(std::move(rgb), std::move(labels));
}

/// Mean normalized Lab over a patch x patch window clipped to the image.
/// Centers outside the image are clamped to the nearest pixel.
inline Lab patch_feature(const ReferenceImage& img, Vec2 center, int patch) {
  if (patch < 1 || patch % 2 == 0) throw Error(ErrorCode::invalid_argument, "patch size must be odd and >= 1");
  if (!img.contains(center))
    std::clog << "autostroke: patch center (" << center.x << ", " << center.y << ") clamped into image\n";
  const auto [cx, cy] = img.pixel_of(center);
  const int half = patch / 2;
  Lab sum{0, 0, 0};
  int count = 0;
  for (int y = std::max(0, cy - half); y <= std::min(img.height() - 1, cy + half); ++y) {
    for (int x = std::max(0, cx - half); x <= std::min(img.width() - 1, cx + half); ++x) {
      const Lab& v = img.lab(x, y);
      for (int c = 0; c < 3; ++c) sum[c] += v[c];
      ++count;
    }
  }
  for (auto& c : sum) c /= count;
  return sum;
}

/// Summed-area table over Lab giving the same patch means as
/// patch_feature in constant time.
class LabIntegral {
 public:
  explicit LabIntegral(const ReferenceImage& img) : w_(img.width()), h_(img.height()), sum_((w_ + 1) * static_cast<std::size_t>(h_ + 1)) {
    for (int y = 0; y < h_; ++y) {
      Lab row{0, 0, 0};
      for (int x = 0; x < w_; ++x) {
        for (int c = 0; c < 3; ++c) {
          row[c] += img.lab(x, y)[c];
          at(x + 1, y + 1)[c] = at(x + 1, y)[c] + row[c];
        }
      }
    }
  }

  Lab mean(Vec2 center, int patch) const {
    const int cx = std::clamp(static_cast<int>(std::floor(center.x)), 0, w_ - 1);
    const int cy = std::clamp(static_cast<int>(std::floor(center.y)), 0, h_ - 1);
    const int half = patch / 2;
    const int x0 = std::max(0, cx - half), x1 = std::min(w_ - 1, cx + half) + 1;
    const int y0 = std::max(0, cy - half), y1 = std::min(h_ - 1, cy + half) + 1;
    const double count = static_cast<double>((x1 - x0) * (y1 - y0));
    Lab out;
    for (int c = 0; c < 3; ++c)
      out[c] = (at(x1, y1)[c] - at(x0, y1)[c] - at(x1, y0)[c] + at(x0, y0)[c]) / count;
    return out;
  }

 private:
  Lab& at(int x, int y) { return sum_[static_cast<std::size_t>(y) * (w_ + 1) + x]; }
  const Lab& at(int x, int y) const { return sum_[static_cast<std::size_t>(y) * (w_ + 1) + x]; }

  int w_;
  int h_;
  std::vector<Lab> sum_;
};

/// Squared Euclidean distance in normalized Lab.
inline double feature_distance(const Lab& a, const Lab& b) {
  double d = 0.0;
  for (int c = 0; c < 3; ++c) d += (a[c] - b[c]) * (a[c] - b[c]);
  return d;
}

/// Odd patch side derived from the local radius, clamped to [5, 21].
inline int patch_size_for_radius(double radius) {
  int p = static_cast<int>(std::lround(radius));
  if (p % 2 == 0) p += 1;
  return std::clamp(p, 5, 21);
}

}  // namespace autostroke
