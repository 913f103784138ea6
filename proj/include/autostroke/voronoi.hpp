#pragma once

#include <span>
#include <vector>

#include "autostroke/constraints.hpp"
#include "autostroke/mask.hpp"
#include "autostroke/neighborhood.hpp"

namespace autostroke {

/// Per-site moments of a discrete Voronoi partition of mask pixels under
/// density 1 / R(p).
struct VoronoiCells {
  std::vector<double> mass;
  std::vector<Vec2> moment;
  std::vector<double> energy;  // sum of rho * |x - site|^2

  Vec2 centroid(std::size_t i, Vec2 fallback) const {
    return mass[i] > 0.0 ? moment[i] / mass[i] : fallback;
  }
};

inline VoronoiCells weighted_voronoi(std::span<const Vec2> sites, const RegionMask& mask, const RadiusMap& radius) {
  VoronoiCells cells;
  cells.mass.assign(sites.size(), 0.0);
  cells.moment.assign(sites.size(), Vec2{});
  cells.energy.assign(sites.size(), 0.0);
  if (sites.empty()) return cells;
  const PointGrid grid(sites, std::max(radius.min_value(), 2.0));
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      const Vec2 p{x + 0.5, y + 0.5};
      const int s = grid.nearest(p);
      const double rho = 1.0 / radius.at(p);
      cells.mass[s] += rho;
      cells.moment[s] += p * rho;
      cells.energy[s] += rho * squared_distance(p, sites[s]);
    }
  }
  return cells;
}

/// Density-weighted centroid of each output stroke's Voronoi cell. Sites
/// [0, output_count) are the output strokes; the rest are other strokes of
/// the layer that still claim territory. Empty cells keep the current
/// position.
inline std::vector<Vec2> correction_centroids(std::span<const Vec2> sites, std::size_t output_count,
                                              const RegionMask& mask, const RadiusMap& radius) {
  const VoronoiCells cells = weighted_voronoi(sites, mask, radius);
  std::vector<Vec2> out(output_count);
  for (std::size_t i = 0; i < output_count; ++i) out[i] = cells.centroid(i, sites[i]);
  return out;
}

/// Centroidal quantization energy of the output sites: sum over their cells
/// of rho(x) |x - site|^2.
inline double quantization_energy(std::span<const Vec2> sites, std::size_t output_count, const RegionMask& mask,
                                  const RadiusMap& radius) {
  const VoronoiCells cells = weighted_voronoi(sites, mask, radius);
  double e = 0.0;
  for (std::size_t i = 0; i < output_count; ++i) e += cells.energy[i];
  return e;
}

}  // namespace autostroke
