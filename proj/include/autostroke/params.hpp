#pragma once

#include <array>
#include <cstdint>

namespace autostroke {

/// Thresholds for the backward repetition scan.
struct GroupingParams {
  double color_std_threshold = 15.0 / 255.0;
  double segmentation_std_threshold = 1.0;
  int k_max = 50;
  std::array<double, 3> lab_weights{0.12, 0.44, 0.44};
  // Fréchet distance bound, relative to the longer of the two resampled strokes.
  double frechet_rel_threshold = 0.4;
  // Side of the square patch used for the grouping color feature.
  int feature_patch = 5;

  friend bool operator==(const GroupingParams&, const GroupingParams&) = default;
};

/// Spacing model triple as shown in the density panel:
/// R(p) = spacing + lightness_coeff * l8(p) + gradient_coeff * g8(p).
struct DensityTriple {
  double spacing = 8.0;
  double lightness_coeff = 0.0;
  double gradient_coeff = 0.0;

  friend bool operator==(const DensityTriple&, const DensityTriple&) = default;
};

struct SynthesisParams {
  int iterations = 15;
  double mu = 0.1;
  int n_in = 4;
  int n_out = 1;
  double unmatched_penalty = 4.0;
  double direction_anchor_weight = 0.1;
  int poisson_attempts = 30;
  double cg_tolerance = 1e-6;
  int cg_max_iterations = 200;
  std::uint64_t seed = 1;

  friend bool operator==(const SynthesisParams&, const SynthesisParams&) = default;
};

/// Everything that lives in the document "params" block.
struct Params {
  GroupingParams grouping;
  SynthesisParams synthesis;
  bool autocomplete = true;
  bool autocolor = false;

  friend bool operator==(const Params&, const Params&) = default;
};

}  // namespace autostroke
