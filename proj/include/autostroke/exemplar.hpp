#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "autostroke/frechet.hpp"
#include "autostroke/image.hpp"
#include "autostroke/params.hpp"
#include "autostroke/stroke.hpp"

namespace autostroke {

enum class Feature : unsigned { color = 1u, semantic = 2u };

struct FeatureSet {
  unsigned bits = 0;
  bool has(Feature f) const { return (bits & static_cast<unsigned>(f)) != 0; }
  void add(Feature f) { bits |= static_cast<unsigned>(f); }
  bool empty() const { return bits == 0; }
  friend bool operator==(FeatureSet, FeatureSet) = default;
};

/// Temporally consecutive repetitive group, oldest first, ending at the
/// stroke that triggered inference.
struct Exemplar {
  std::vector<Stroke> strokes;
  FeatureSet shared_features;

  std::size_t k() const { return strokes.size(); }
  bool valid() const { return strokes.size() >= 2 && !shared_features.empty(); }
  const Stroke& last() const { return strokes.back(); }
};

/// Weighted Lab color feature of a stroke.
inline Lab color_feature(const ReferenceImage& img, const Stroke& s, const GroupingParams& params) {
  Lab f = patch_feature(img, summarize(s).centroid, params.feature_patch);
  for (int c = 0; c < 3; ++c) f[c] *= params.lab_weights[c];
  return f;
}

/// Population standard deviation of each channel.
inline std::array<double, 3> channel_std(std::span<const Lab> values) {
  std::array<double, 3> mean{0, 0, 0}, var{0, 0, 0};
  if (values.empty()) return var;
  for (const auto& v : values)
    for (int c = 0; c < 3; ++c) mean[c] += v[c];
  for (auto& m : mean) m /= static_cast<double>(values.size());
  for (const auto& v : values)
    for (int c = 0; c < 3; ++c) var[c] += (v[c] - mean[c]) * (v[c] - mean[c]);
  for (auto& x : var) x = std::sqrt(x / static_cast<double>(values.size()));
  return var;
}

inline double population_std(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  return std::sqrt(var / static_cast<double>(values.size()));
}

namespace detail {

struct GroupFeatures {
  std::vector<Lab> colors;
  std::vector<double> labels;
};

inline FeatureSet passing_features(const GroupFeatures& g, bool labels_present, const GroupingParams& params) {
  FeatureSet out;
  const auto sd = channel_std(g.colors);
  if (sd[0] <= params.color_std_threshold && sd[1] <= params.color_std_threshold &&
      sd[2] <= params.color_std_threshold)
    out.add(Feature::color);
  if (labels_present && population_std(g.labels) < params.segmentation_std_threshold) out.add(Feature::semantic);
  return out;
}

}  // namespace detail

/// Scans the history backward from its last stroke and returns the
/// repetitive group, or nothing when fewer than two strokes qualify.
///
/// A predecessor joins while it is shape-similar to the last stroke and the
/// group, including it, still shares at least one image feature (color std
/// per weighted Lab channel, or label-id std). The scan stops at the first
/// failure or once the group holds `k_max` strokes.
inline std::optional<Exemplar> infer_exemplar(std::span<const Stroke> history, const ReferenceImage& img,
                                              const GroupingParams& params) {
  if (history.empty()) return std::nullopt;
  const Stroke& last = history.back();
  const bool labels_present = img.has_labels();

  detail::GroupFeatures group;
  auto push = [&](const Stroke& s) {
    group.colors.push_back(color_feature(img, s, params));
    group.labels.push_back(static_cast<double>(img.label_at(summarize(s).centroid).value_or(0)));
  };
  push(last);
  std::size_t first = history.size() - 1;

  while (first > 0 && static_cast<int>(history.size() - first) < params.k_max) {
    const Stroke& candidate = history[first - 1];
    if (!shape_similar(candidate, last, params.frechet_rel_threshold)) break;
    push(candidate);
    if (detail::passing_features(group, labels_present, params).empty()) {
      group.colors.pop_back();
      group.labels.pop_back();
      break;
    }
    --first;
  }

  Exemplar ex;
  ex.strokes.assign(history.begin() + static_cast<std::ptrdiff_t>(first), history.end());
  if (ex.k() < 2) return std::nullopt;
  ex.shared_features = detail::passing_features(group, labels_present, params);
  return ex;
}

}  // namespace autostroke
