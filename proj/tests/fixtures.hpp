#pragma once

// Synthetic images, strokes and documents shared by the tests.

#include <cmath>
#include <filesystem>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "autostroke/exemplar.hpp"
#include "autostroke/image.hpp"
#include "autostroke/png_io.hpp"
#include "autostroke/mask.hpp"
#include "autostroke/stroke.hpp"

namespace fixtures {

using namespace autostroke;

inline std::shared_ptr<const ReferenceImage> constant_image(int w, int h, Rgb8 c = {128, 128, 128}) {
  return std::make_shared<const ReferenceImage>(make_reference(Raster<Rgb8>(w, h, c)));
}

/// Image painted by a per-pixel color function of the pixel center.
inline std::shared_ptr<const ReferenceImage> painted_image(int w, int h, const std::function<Rgb8(Vec2)>& f,
                                                           std::optional<Raster<int>> labels = std::nullopt) {
  Raster<Rgb8> rgb(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) rgb(x, y) = f({x + 0.5, y + 0.5});
  return std::make_shared<const ReferenceImage>(make_reference(std::move(rgb), std::move(labels)));
}

/// Left half `a`, right half `b`, split at x = split.
inline std::shared_ptr<const ReferenceImage> two_tone_image(int w, int h, int split, Rgb8 a, Rgb8 b) {
  return painted_image(w, h, [&](Vec2 p) { return p.x < split ? a : b; });
}

/// Straight stroke of `n` points centered at c along direction `angle`.
inline Stroke line_stroke(Vec2 c, double angle, double length, StrokeId id = 0, double t0 = 0.0, int n = 5) {
  Stroke s;
  s.id = id;
  s.width = 2.0;
  const Vec2 d{std::cos(angle), std::sin(angle)};
  for (int i = 0; i < n; ++i) {
    const double u = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1) - 0.5;
    const Vec2 p = c + d * (u * length);
    s.points.push_back({p.x, p.y, t0 + 10.0 * i, 1.0});
  }
  return s;
}

/// Exemplar-like grid of horizontal strokes with the given spacing.
inline std::vector<Stroke> stroke_grid(Vec2 origin, int cols, int rows, double spacing, double length = 4.0,
                                       StrokeId first_id = 1) {
  std::vector<Stroke> out;
  StrokeId id = first_id;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const double t0 = 100.0 * static_cast<double>(id);
      out.push_back(line_stroke(origin + Vec2{c * spacing, r * spacing}, 0.0, length, id, t0));
      ++id;
    }
  return out;
}

inline Document document_with(std::vector<Stroke> strokes, std::string image = "") {
  Document doc;
  doc.image = std::move(image);
  doc.layers.push_back(Layer{1, "Layer 1", std::move(strokes)});
  return doc;
}

inline std::vector<Vec2> centroids_of(const std::vector<Stroke>& strokes) {
  std::vector<Vec2> out;
  for (const auto& s : strokes) out.push_back(summarize(s).centroid);
  return out;
}

/// Brute-force nearest-neighbor distances.
inline std::vector<double> nn_distances(const std::vector<Vec2>& pts) {
  std::vector<double> out(pts.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (i != j) out[i] = std::min(out[i], std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y));
  return out;
}

inline std::string temp_dir(const std::string& name) {
#ifdef AUTOSTROKE_TEST_TMP
  const std::filesystem::path base = AUTOSTROKE_TEST_TMP;
#else
  const std::filesystem::path base = std::filesystem::temp_directory_path() / "autostroke-tests";
#endif
  const auto dir = base / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

inline void write_rgb_png(const std::string& path, const ReferenceImage& img) {
  Raster<Rgba8> px(img.width(), img.height());
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = {img.rgb[i][0], img.rgb[i][1], img.rgb[i][2], 255};
  write_png(path, px);
}

/// Exemplar with the given strokes and shared features, bypassing grouping.
inline Exemplar make_exemplar(std::vector<Stroke> strokes, FeatureSet features = {1u}) {
  Exemplar ex;
  ex.strokes = std::move(strokes);
  ex.shared_features = features;
  return ex;
}

inline Rgb8 random_color(std::mt19937& gen) {
  std::uniform_int_distribution<int> c(0, 255);
  return {static_cast<std::uint8_t>(c(gen)), static_cast<std::uint8_t>(c(gen)), static_cast<std::uint8_t>(c(gen))};
}

/// Two colors at least `min_gap` apart in plain RGB.
inline std::pair<Rgb8, Rgb8> distinct_colors(std::mt19937& gen, double min_gap = 120.0) {
  for (;;) {
    const Rgb8 a = random_color(gen), b = random_color(gen);
    const double d = std::hypot(a[0] - b[0], std::hypot(a[1] - b[1], a[2] - b[2]));
    if (d >= min_gap) return {a, b};
  }
}

struct DiscFixture {
  std::shared_ptr<const ReferenceImage> image;
  RegionMask truth;
  Exemplar exemplar;
};

/// Disc of color A on background B with `k` short strokes inside the disc.
inline DiscFixture disc_fixture(std::mt19937& gen, int size = 96, int k = 8) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto [a, b] = distinct_colors(gen);
  const double radius = size * (0.18 + 0.12 * u(gen));
  const Vec2 c{size * (0.35 + 0.3 * u(gen)), size * (0.35 + 0.3 * u(gen))};
  DiscFixture f;
  f.image = painted_image(size, size, [&](Vec2 p) { return distance(p, c) < radius ? a : b; });
  f.truth = RegionMask(size, size);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) f.truth.set(x, y, distance({x + 0.5, y + 0.5}, c) < radius);
  std::vector<Stroke> strokes;
  for (int i = 0; i < k; ++i) {
    const double ang = 2 * kPi * i / k, rr = radius * 0.5 * u(gen);
    strokes.push_back(line_stroke(c + Vec2{std::cos(ang), std::sin(ang)} * rr, 0.6, 4.0, i + 1, 100.0 * i));
  }
  f.exemplar = make_exemplar(std::move(strokes));
  return f;
}

struct TwoBlobFixture {
  std::shared_ptr<const ReferenceImage> image;
  RegionMask near_blob, far_blob;
  Exemplar exemplar;
};

/// Two same-color discs; the exemplar and its last stroke sit in the first.
inline TwoBlobFixture two_blob_fixture(std::mt19937& gen, int w = 128, int h = 64) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto [a, b] = distinct_colors(gen);
  const double r1 = 12 + 6 * u(gen), r2 = 12 + 6 * u(gen);
  Vec2 c1{24 + 8 * u(gen), 32 + 6 * (u(gen) - 0.5)};
  Vec2 c2{w - 24 - 8 * u(gen), 32 + 6 * (u(gen) - 0.5)};
  if (u(gen) < 0.5) std::swap(c1, c2);
  TwoBlobFixture f;
  f.image = painted_image(w, h, [&](Vec2 p) { return distance(p, c1) < r1 || distance(p, c2) < r2 ? a : b; });
  f.near_blob = RegionMask(w, h);
  f.far_blob = RegionMask(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      f.near_blob.set(x, y, distance({x + 0.5, y + 0.5}, c1) < r1);
      f.far_blob.set(x, y, distance({x + 0.5, y + 0.5}, c2) < r2);
    }
  std::vector<Stroke> strokes;
  for (int i = 0; i < 6; ++i)
    strokes.push_back(line_stroke(c1 + Vec2{(i % 3 - 1) * 4.0, (i / 3 - 0.5) * 6.0}, 0.0, 3.0, i + 1, 100.0 * i));
  f.exemplar = make_exemplar(std::move(strokes));
  return f;
}

struct OrientationFixture {
  std::shared_ptr<const ReferenceImage> image;
  Exemplar exemplar;
};

/// Dark disc on a light background. Aligned exemplars follow the circle
/// tangent with a few degrees of jitter, the others point anywhere.
inline OrientationFixture orientation_fixture(std::mt19937& gen, bool aligned, int size = 96, int k = 12) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Vec2 c{size * (0.4 + 0.2 * u(gen)), size * (0.4 + 0.2 * u(gen))};
  const double radius = size * (0.22 + 0.08 * u(gen));
  OrientationFixture f;
  f.image = painted_image(size, size, [&](Vec2 p) { return distance(p, c) < radius ? Rgb8{30, 30, 40} : Rgb8{225, 220, 210}; });
  std::vector<Stroke> strokes;
  const double phase = 2 * kPi * u(gen);
  for (int i = 0; i < k; ++i) {
    const double ang = phase + 2 * kPi * i / k;
    const Vec2 p = c + Vec2{std::cos(ang), std::sin(ang)} * (radius + 2.0 * (u(gen) - 0.5));
    const double jitter = (u(gen) - 0.5) * 10.0 * kPi / 180.0;
    const double dir = aligned ? ang + kPi / 2 + jitter : 2 * kPi * u(gen);
    strokes.push_back(line_stroke(p, dir, 6.0, i + 1, 100.0 * i));
  }
  f.exemplar = make_exemplar(std::move(strokes));
  return f;
}

struct PlantedRadiusFixture {
  std::shared_ptr<const ReferenceImage> image;
  Exemplar exemplar;
};

/// Isolated vertical pairs of strokes, one pair per flat gray block, with
/// pair separation = intercept + slope * l8 at the block (+ jitter).
inline PlantedRadiusFixture planted_radius_fixture(std::mt19937& gen, double intercept, double slope,
                                                   double jitter = 0.0, int blocks = 5, int block = 64) {
  std::uniform_int_distribution<int> gray(20, 240);
  std::uniform_real_distribution<double> noise(-jitter, jitter);
  std::vector<Rgb8> tones;
  for (int i = 0; i < blocks * blocks; ++i) {
    const auto g = static_cast<std::uint8_t>(gray(gen));
    tones.push_back({g, g, g});
  }
  const int size = blocks * block;
  PlantedRadiusFixture f;
  f.image = painted_image(size, size, [&](Vec2 p) {
    return tones[static_cast<int>(p.y) / block * blocks + static_cast<int>(p.x) / block];
  });
  std::vector<Stroke> strokes;
  StrokeId id = 1;
  for (int by = 0; by < blocks; ++by)
    for (int bx = 0; bx < blocks; ++bx) {
      const Vec2 c{bx * block + block / 2.0, by * block + block / 2.0};
      const double d = intercept + slope * 255.0 * f.image->lightness_at(c) + noise(gen);
      for (double s : {-0.5, 0.5}) {
        strokes.push_back(line_stroke(c + Vec2{0.0, s * d}, 0.0, 4.0, id, 100.0 * id));
        ++id;
      }
    }
  f.exemplar = make_exemplar(std::move(strokes));
  return f;
}

/// Colored square [24, 104)^2 on a light background.
inline std::shared_ptr<const ReferenceImage> hatch_image(int size = 128) {
  return painted_image(size, size, [](Vec2 p) {
    const bool in = p.x >= 24 && p.x < 104 && p.y >= 24 && p.y < 104;
    return in ? Rgb8{180, 60, 50} : Rgb8{230, 230, 225};
  });
}

/// i-th diagonal hatch stroke of a 4-wide grid with spacing 8 inside the square.
inline Stroke hatch_stroke(int i, double t0 = -1.0) {
  const Vec2 c{40.0 + 8.0 * (i % 4), 40.0 + 8.0 * (i / 4)};
  return line_stroke(c, -kPi / 4, 5.0, 0, t0 >= 0 ? t0 : 1000.0 * (i + 1));
}

}  // namespace fixtures
