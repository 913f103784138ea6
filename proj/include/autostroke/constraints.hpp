#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "autostroke/exemplar.hpp"
#include "autostroke/flow_field.hpp"
#include "autostroke/image.hpp"
#include "autostroke/params.hpp"

namespace autostroke {

// ---------------------------------------------------------------------------
// Orientation

enum class OrientationMode { global, flow };

inline const char* to_string(OrientationMode m) { return m == OrientationMode::global ? "global" : "flow"; }

/// Local frame per location: identity in global mode, otherwise the rotation
/// taking +x onto the flow tangent.
struct OrientationMap {
  OrientationMode mode = OrientationMode::global;
  std::shared_ptr<const FlowField> field;

  Rotation frame(Vec2 p) const {
    if (mode == OrientationMode::global || !field || field->global) return {};
    return Rotation::aligning_x_to(field->at(p));
  }
};

/// Unsigned angle in degrees between a stroke direction and a line
/// direction, folded into [0, 90].
inline double folded_angle_deg(Vec2 direction, Vec2 tangent) {
  const double c = std::min(1.0, std::abs(dot(normalized(direction), normalized(tangent))));
  return std::acos(c) * 180.0 / kPi;
}

/// Population std of the folded stroke/tangent angles, or nullopt when no
/// exemplar stroke has a direction.
inline std::optional<double> orientation_spread_deg(const Exemplar& ex, const FlowField& etf) {
  std::vector<double> angles;
  for (const auto& s : ex.strokes) {
    const StrokeSummary sum = summarize(s);
    if (sum.direction == Vec2{}) continue;
    angles.push_back(folded_angle_deg(sum.direction, etf.at(sum.centroid)));
  }
  if (angles.empty()) return std::nullopt;
  return population_std(angles);
}

/// Flow mode when the exemplar follows the edge tangents (angle std below
/// 15 degrees), global otherwise. Dots and edge-free images are global.
inline OrientationMap infer_orientation(const Exemplar& ex, std::shared_ptr<const FlowField> etf,
                                        double threshold_deg = 15.0) {
  OrientationMap out;
  out.field = etf;
  if (!etf || etf->global) return out;
  const auto spread = orientation_spread_deg(ex, *etf);
  if (spread && *spread < threshold_deg) out.mode = OrientationMode::flow;
  return out;
}

/// Overwrites tangents within `brush_radius` of the gesture polyline with the
/// local gesture direction, then blends the seam with one smoothing pass.
inline FlowField apply_gesture(const FlowField& field, std::span<const Vec2> gesture, double brush_radius,
                               int width, int height, bool smooth = true) {
  if (gesture.size() < 2) return field;
  FlowField out = field;
  if (out.global || out.tangents.empty()) out.tangents = Raster<Vec2>(width, height, Vec2{1.0, 0.0});
  if (out.magnitude.empty()) out.magnitude = Raster<double>(width, height, 0.0);
  out.global = false;

  Raster<std::uint8_t> seam(width, height, 0);
  const double reach = brush_radius + EtfOptions{}.radius;
  bool touched = false;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Vec2 p{x + 0.5, y + 0.5};
      double best = std::numeric_limits<double>::infinity();
      Vec2 dir;
      for (std::size_t k = 1; k < gesture.size(); ++k) {
        const Vec2 seg = gesture[k] - gesture[k - 1];
        if (squared_norm(seg) <= 0.0) continue;
        const double d = squared_distance_to_segment(p, gesture[k - 1], gesture[k]);
        if (d < best) { best = d; dir = normalized(seg); }
      }
      if (best <= brush_radius * brush_radius) {
        out.tangents(x, y) = dir;
        touched = true;
      }
      if (best <= reach * reach) seam(x, y) = 1;
    }
  }
  if (touched && smooth) out.tangents = detail::etf_pass(out.tangents, out.magnitude, EtfOptions{}.radius, &seam);
  for (auto& v : out.tangents.data())
    if (v == Vec2{}) v = {1.0, 0.0};
  return out;
}

// ---------------------------------------------------------------------------
// Radius

enum class RadiusMode { constant, model };

inline const char* to_string(RadiusMode m) { return m == RadiusMode::constant ? "constant" : "model"; }

inline constexpr double kMinRadius = 2.0;
inline constexpr double kMaxRadius = 64.0;

/// Per-pixel target spacing R(p) in px, always within [2, 64].
struct RadiusMap {
  RadiusMode mode = RadiusMode::constant;
  DensityTriple params;
  Raster<double> values;

  double at(Vec2 p) const {
    if (values.empty()) return std::clamp(params.spacing, kMinRadius, kMaxRadius);
    const int x = std::clamp(static_cast<int>(std::floor(p.x)), 0, values.width() - 1);
    const int y = std::clamp(static_cast<int>(std::floor(p.y)), 0, values.height() - 1);
    return values(x, y);
  }
  double min_value() const { return values.empty() ? at({}) : *std::min_element(values.data().begin(), values.data().end()); }
  double max_value() const { return values.empty() ? at({}) : *std::max_element(values.data().begin(), values.data().end()); }
};

/// R(p) = clamp(spacing + lightness_coeff * l8(p) + gradient_coeff * g8(p), 2, 64),
/// with lightness and gradient on a 0..255 scale.
inline RadiusMap radius_from_params(const ReferenceImage& img, const DensityTriple& triple) {
  RadiusMap map;
  map.params = triple;
  map.mode = (triple.lightness_coeff == 0.0 && triple.gradient_coeff == 0.0) ? RadiusMode::constant : RadiusMode::model;
  map.values = Raster<double>(img.width(), img.height());
  for (std::size_t i = 0; i < map.values.size(); ++i) {
    const double r = triple.spacing + triple.lightness_coeff * 255.0 * img.lightness[i] +
                     triple.gradient_coeff * 255.0 * img.gradient[i];
    map.values[i] = std::clamp(r, kMinRadius, kMaxRadius);
  }
  return map;
}

/// Least-squares fit of r = (l g 1) . beta on the exemplar.
struct RadiusModelFit {
  Eigen::Vector3d beta = Eigen::Vector3d::Zero();  // on l8, g8, 1
  double r_squared = 0.0;
  std::vector<double> nn_distances;
  double mean_nn = 0.0;
};

/// Distance from each point to its nearest other point.
inline std::vector<double> nearest_neighbor_distances(std::span<const Vec2> pts) {
  std::vector<double> out(pts.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (i != j) out[i] = std::min(out[i], distance(pts[i], pts[j]));
  return out;
}

/// Fits the spacing model; the map uses the model when r^2 >= 0.5 and the
/// mean nearest-neighbor distance otherwise.
inline std::pair<RadiusModelFit, RadiusMap> fit_radius_model(const Exemplar& ex, const ReferenceImage& img,
                                                             double min_r_squared = 0.5) {
  if (ex.k() < 2) throw Error(ErrorCode::invalid_exemplar, "radius fit needs at least two exemplar strokes");
  std::vector<Vec2> centroids;
  for (const auto& s : ex.strokes) centroids.push_back(summarize(s).centroid);
  RadiusModelFit fit;
  fit.nn_distances = nearest_neighbor_distances(centroids);
  const auto k = static_cast<Eigen::Index>(centroids.size());
  Eigen::MatrixXd X(k, 3);
  Eigen::VectorXd r(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    X(i, 0) = 255.0 * img.lightness_at(centroids[i]);
    X(i, 1) = 255.0 * img.gradient_at(centroids[i]);
    X(i, 2) = 1.0;
    r(i) = fit.nn_distances[i];
  }
  fit.mean_nn = r.mean();
  fit.beta = X.completeOrthogonalDecomposition().solve(r);
  const double ss_tot = (r.array() - fit.mean_nn).square().sum();
  const double ss_res = (X * fit.beta - r).squaredNorm();
  const double scale = std::max(1.0, fit.mean_nn * fit.mean_nn) * static_cast<double>(k);
  fit.r_squared = ss_tot > 1e-12 * scale ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 0.0;

  RadiusMap map;
  if (fit.r_squared >= min_r_squared) {
    map = radius_from_params(img, DensityTriple{fit.beta(2), fit.beta(0), fit.beta(1)});
    map.mode = RadiusMode::model;
  } else {
    map = radius_from_params(img, DensityTriple{fit.mean_nn, 0.0, 0.0});
    map.mode = RadiusMode::constant;
  }
  return {fit, map};
}

}  // namespace autostroke
