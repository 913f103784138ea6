#pragma once

#include <memory>
#include <optional>
#include <span>
#include <stop_token>
#include <vector>

#include "autostroke/constraints.hpp"
#include "autostroke/exemplar.hpp"
#include "autostroke/flow_field.hpp"
#include "autostroke/region.hpp"
#include "autostroke/synthesis.hpp"

namespace autostroke {

/// Everything synthesis needs besides the existing strokes. Kept by the
/// session so that region, density and orientation edits can re-run
/// synthesis on the same exemplar.
struct PipelineInputs {
  Exemplar exemplar;
  RegionMask region;
  OrientationMap orientation;
  RadiusMap radius;
  std::optional<RadiusModelFit> fit;  // absent when the triple was given
};

/// Manual replacements for inferred constraints (batch mode, CLI flags).
struct PipelineOverrides {
  std::optional<RegionMask> region;
  std::optional<DensityTriple> triple;
  std::optional<OrientationMode> orientation;
};

/// Exemplar from an explicit stroke list; shared features are whatever
/// the whole list passes.
inline Exemplar exemplar_from_strokes(std::vector<Stroke> strokes, const ReferenceImage& img,
                                      const GroupingParams& params) {
  if (strokes.size() < 2) throw Error(ErrorCode::invalid_exemplar, "an exemplar needs at least two strokes");
  detail::GroupFeatures g;
  for (const auto& s : strokes) {
    g.colors.push_back(color_feature(img, s, params));
    g.labels.push_back(static_cast<double>(img.label_at(summarize(s).centroid).value_or(0)));
  }
  Exemplar ex;
  ex.shared_features = detail::passing_features(g, img.has_labels(), params);
  ex.strokes = std::move(strokes);
  return ex;
}

/// Region, orientation and radius for a known exemplar.
inline PipelineInputs infer_constraints(Exemplar exemplar, const ReferenceImage& img,
                                        std::shared_ptr<const FlowField> etf, const Params& params,
                                        const PipelineOverrides& overrides = {}, std::stop_token stop = {}) {
  PipelineInputs in;
  if (overrides.region) {
    if (!overrides.region->pixels.same_shape(img.rgb))
      throw Error(ErrorCode::dimension_mismatch, "region mask size differs from image");
    in.region = *overrides.region;
  } else {
    in.region = infer_region(img, exemplar, exemplar.last(), params.grouping, stop);
  }
  if (in.region.empty()) throw Error(ErrorCode::no_region, "region is empty");
  if (overrides.orientation) {
    in.orientation.mode = *overrides.orientation;
    in.orientation.field = etf;
  } else {
    in.orientation = infer_orientation(exemplar, etf);
  }
  if (overrides.triple) {
    in.radius = radius_from_params(img, *overrides.triple);
  } else {
    auto [fit, map] = fit_radius_model(exemplar, img);
    in.fit = fit;
    in.radius = std::move(map);
  }
  in.exemplar = std::move(exemplar);
  return in;
}

/// Exemplar from the history tail plus its constraints, or nothing when the
/// history holds no valid exemplar.
inline std::optional<PipelineInputs> infer_inputs(std::span<const Stroke> history, const ReferenceImage& img,
                                                  std::shared_ptr<const FlowField> etf, const Params& params,
                                                  const PipelineOverrides& overrides = {},
                                                  std::stop_token stop = {}) {
  auto ex = infer_exemplar(history, img, params.grouping);
  if (!ex || (!ex->valid() && !overrides.region)) return std::nullopt;
  return infer_constraints(std::move(*ex), img, std::move(etf), params, overrides, stop);
}

inline SynthesisContext make_context(const PipelineInputs& in, std::shared_ptr<const ReferenceImage> img,
                                     std::vector<Stroke> existing, const SynthesisParams& params) {
  SynthesisContext ctx;
  ctx.exemplar = in.exemplar;
  ctx.image = std::move(img);
  ctx.mask = in.region;
  ctx.orientation = in.orientation;
  ctx.radius = in.radius;
  ctx.existing_strokes = std::move(existing);
  ctx.params = params;
  return ctx;
}

}  // namespace autostroke
