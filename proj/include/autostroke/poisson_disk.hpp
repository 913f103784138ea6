#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "autostroke/geometry.hpp"
#include "autostroke/mask.hpp"

namespace autostroke {

/// Deterministic uniform doubles from a 64-bit Mersenne Twister; avoids the
/// implementation-defined std distributions so sequences match everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }

 private:
  std::mt19937_64 engine_;
};

/// Variable-radius Poisson-disk sampling inside `mask`.
///
/// A candidate c is accepted when every accepted sample s (including the
/// `fixed` points) satisfies |c - s| >= min(R(c), R(s)). Growth follows
/// Bridson: `attempts` annulus candidates in [R(s), 2 R(s)] per active sample.
/// When the active list drains, mask pixels are scanned in shuffled order to
/// seed any region not yet covered, so disconnected pieces are filled too.
inline std::vector<Vec2> poisson_disk_sample(const RegionMask& mask, const std::function<double(Vec2)>& radius,
                                             double min_radius, std::span<const Vec2> fixed, std::uint64_t seed,
                                             int attempts = 30) {
  const int w = mask.width();
  const int h = mask.height();
  const double cell = std::max(min_radius, 1e-3) / std::sqrt(2.0);
  const int gx = static_cast<int>(std::ceil(w / cell)) + 1;
  const int gy = static_cast<int>(std::ceil(h / cell)) + 1;
  std::vector<std::vector<int>> grid(static_cast<std::size_t>(gx) * gy);

  struct Sample { Vec2 p; double r; };
  std::vector<Sample> all;
  auto cell_of = [&](Vec2 p) {
    return std::pair{std::clamp(static_cast<int>(std::floor(p.x / cell)), 0, gx - 1),
                     std::clamp(static_cast<int>(std::floor(p.y / cell)), 0, gy - 1)};
  };
  auto insert = [&](Vec2 p) {
    const auto [cx, cy] = cell_of(p);
    grid[static_cast<std::size_t>(cy) * gx + cx].push_back(static_cast<int>(all.size()));
    all.push_back({p, radius(p)});
  };
  auto accept = [&](Vec2 c) {
    if (!mask.contains(c)) return false;
    const double rc = radius(c);
    const int reach = static_cast<int>(std::ceil(rc / cell));
    const auto [cx, cy] = cell_of(c);
    for (int y = std::max(0, cy - reach); y <= std::min(gy - 1, cy + reach); ++y)
      for (int x = std::max(0, cx - reach); x <= std::min(gx - 1, cx + reach); ++x)
        for (int i : grid[static_cast<std::size_t>(y) * gx + x]) {
          const double m = std::min(rc, all[i].r);
          if (squared_distance(c, all[i].p) < m * m) return false;
        }
    return true;
  };

  for (const auto& f : fixed) insert(f);
  const std::size_t first_output = all.size();

  Rng rng(seed);
  std::vector<int> active;
  auto grow = [&]() {
    while (!active.empty()) {
      const std::size_t slot = rng.index(active.size());
      const Sample s = all[active[slot]];
      bool placed = false;
      for (int k = 0; k < attempts; ++k) {
        const double theta = rng.uniform(0.0, 2.0 * kPi);
        const double rho = rng.uniform(s.r, 2.0 * s.r);
        const Vec2 c = s.p + Vec2{std::cos(theta), std::sin(theta)} * rho;
        if (accept(c)) {
          active.push_back(static_cast<int>(all.size()));
          insert(c);
          placed = true;
          break;
        }
      }
      if (!placed) {
        active[slot] = active.back();
        active.pop_back();
      }
    }
  };

  std::vector<int> pixels;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (mask.at(x, y)) pixels.push_back(y * w + x);
  for (std::size_t i = pixels.size(); i > 1; --i) std::swap(pixels[i - 1], pixels[rng.index(i)]);

  for (int px : pixels) {
    const Vec2 c{px % w + rng.uniform(), px / w + rng.uniform()};
    if (!accept(c)) continue;
    active.push_back(static_cast<int>(all.size()));
    insert(c);
    grow();
  }

  std::vector<Vec2> out;
  for (std::size_t i = first_output; i < all.size(); ++i) out.push_back(all[i].p);
  return out;
}

}  // namespace autostroke
