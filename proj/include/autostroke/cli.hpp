#pragma once

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "autostroke/document_io.hpp"
#include "autostroke/pipeline.hpp"
#include "autostroke/render.hpp"

namespace autostroke::cli {

enum ExitCode : int { ok = 0, suppressed = 1, failure = 2 };

/// Suppression (nothing to suggest) versus bad input.
inline int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_exemplar:
    case ErrorCode::no_region:
    case ErrorCode::empty_output:
      return suppressed;
    default:
      return failure;
  }
}

struct InputOptions {
  std::string document;
  std::optional<std::string> image;   // defaults to the document's image field
  std::optional<std::string> labels;  // defaults to the document's labels field
};

struct SynthOptions {
  InputOptions input;
  std::string out;
  std::optional<std::string> png;  // default: out with .png extension
  std::optional<std::string> region_mask;
  std::vector<StrokeId> exemplar_ids;
  std::optional<std::uint64_t> seed;
  std::optional<int> iterations;
  std::optional<double> mu;
  std::optional<double> spacing;
  std::optional<double> lightness;
  std::optional<double> gradient;
  std::optional<std::string> orientation;
  bool provenance = false;
};

struct RenderCmdOptions {
  std::string document;
  std::string out;
  std::optional<std::string> image;  // canvas size source
  std::optional<std::pair<int, int>> size;
  bool provenance = false;
};

/// Paths in a document are relative to the document's directory.
inline std::string resolve_path(const std::string& doc_path, const std::string& p) {
  const std::filesystem::path path(p);
  if (path.is_absolute()) return p;
  return (std::filesystem::path(doc_path).parent_path() / path).string();
}

struct Loaded {
  Document doc;
  std::shared_ptr<const ReferenceImage> image;
};

inline Loaded load_inputs(const InputOptions& in) {
  Loaded l;
  l.doc = load_document(in.document);
  std::string image = in.image.value_or("");
  if (image.empty()) {
    if (l.doc.image.empty()) throw Error(ErrorCode::invalid_argument, "no reference image given");
    image = resolve_path(in.document, l.doc.image);
  }
  std::optional<std::string> labels = in.labels;
  if (!labels && l.doc.labels) labels = resolve_path(in.document, *l.doc.labels);
  if (!std::filesystem::exists(image)) throw Error(ErrorCode::io, "reference image '" + image + "' not found");
  l.image = std::make_shared<const ReferenceImage>(load_reference(image, labels));
  return l;
}

/// Binary mask from a PNG: any nonzero red channel is inside.
inline RegionMask load_region_mask(const std::string& path) {
  const Raster<Rgba8> px = read_png(path);
  RegionMask m(px.width(), px.height());
  for (std::size_t i = 0; i < px.size(); ++i) m.pixels[i] = px[i][0] != 0 ? 1 : 0;
  m.provenance = MaskProvenance::user_edited;
  return m;
}

inline std::vector<Stroke> manual_history(const Layer& layer) {
  std::vector<Stroke> out;
  for (const auto& s : layer.strokes)
    if (s.source == StrokeSource::manual) out.push_back(s);
  return out;
}

inline PipelineOverrides overrides_from(const SynthOptions& o) {
  PipelineOverrides ov;
  if (o.region_mask) ov.region = load_region_mask(*o.region_mask);
  if (o.spacing || o.lightness || o.gradient) {
    ov.triple = DensityTriple{o.spacing.value_or(DensityTriple{}.spacing), o.lightness.value_or(0.0),
                              o.gradient.value_or(0.0)};
  }
  if (o.orientation) {
    if (*o.orientation == "global") ov.orientation = OrientationMode::global;
    else if (*o.orientation == "flow") ov.orientation = OrientationMode::flow;
    else throw Error(ErrorCode::invalid_argument, "orientation must be global or flow");
  }
  return ov;
}

/// Batch synthesis into the last layer. All outputs are committed with
/// fresh ids and timestamps following the document's latest stroke.
inline int cmd_synth(const SynthOptions& o, std::ostream& out, std::ostream& err) {
  try {
    Loaded l = load_inputs(o.input);
    Document& doc = l.doc;
    if (doc.layers.empty()) throw Error(ErrorCode::invalid_exemplar, "document has no strokes");
    if (o.seed) doc.params.synthesis.seed = *o.seed;
    if (o.iterations) doc.params.synthesis.iterations = *o.iterations;
    if (o.mu) doc.params.synthesis.mu = *o.mu;
    Layer& layer = doc.layers.back();
    const PipelineOverrides ov = overrides_from(o);
    const auto etf = std::make_shared<const FlowField>(compute_etf(*l.image));

    std::optional<PipelineInputs> inputs;
    if (!o.exemplar_ids.empty()) {
      std::vector<Stroke> strokes;
      for (StrokeId id : o.exemplar_ids) {
        const Stroke* s = doc.find_stroke(id);
        if (!s) throw Error(ErrorCode::invalid_argument, "unknown exemplar stroke " + std::to_string(id));
        strokes.push_back(*s);
      }
      inputs = infer_constraints(exemplar_from_strokes(std::move(strokes), *l.image, doc.params.grouping), *l.image,
                                 etf, doc.params, ov);
    } else {
      inputs = infer_inputs(manual_history(layer), *l.image, etf, doc.params, ov);
    }
    if (!inputs) {
      err << "autostroke: no exemplar in the stroke history\n";
      return suppressed;
    }
    const SynthesisResult result = synthesize(make_context(*inputs, l.image, layer.strokes, doc.params.synthesis));

    StrokeId id = doc.next_stroke_id();
    double t = doc.max_time();
    for (Stroke s : result.strokes) {
      s.id = id++;
      s.suggestion = 1;
      const double t0 = s.points.front().t;
      for (auto& p : s.points) p.t = t + 1.0 + (p.t - t0);
      t = s.points.back().t;
      layer.strokes.push_back(std::move(s));
    }
    save_document(doc, o.out);
    const std::string png = o.png.value_or(std::filesystem::path(o.out).replace_extension(".png").string());
    write_png(png, render_raster(doc, l.image->width(), l.image->height(), RenderOptions{o.provenance, {}}));
    out << json{{"strokes", result.strokes.size()}, {"exemplar_k", inputs->exemplar.k()}, {"out", o.out}, {"png", png}}.dump()
        << '\n';
    return ok;
  } catch (const Error& e) {
    err << "autostroke: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "autostroke: " << e.what() << '\n';
    return failure;
  }
}

/// Machine-readable report of the three inference steps.
inline int cmd_infer(const InputOptions& in, std::ostream& out, std::ostream& err) {
  try {
    Loaded l = load_inputs(in);
    json report;
    std::vector<Stroke> history;
    if (!l.doc.layers.empty()) history = manual_history(l.doc.layers.back());
    const auto ex = infer_exemplar(history, *l.image, l.doc.params.grouping);
    if (!ex) {
      out << json{{"exemplar", nullptr}, {"reason", "no exemplar"}}.dump() << '\n';
      return suppressed;
    }
    std::vector<StrokeId> ids;
    for (const auto& s : ex->strokes) ids.push_back(s.id);
    json features = json::array();
    if (ex->shared_features.has(Feature::color)) features.push_back("color");
    if (ex->shared_features.has(Feature::semantic)) features.push_back("semantic");
    report["exemplar"] = json{{"k", ex->k()}, {"ids", ids}, {"shared_features", features}};
    if (!ex->valid()) {
      report["reason"] = "exemplar shares no feature";
      out << report.dump() << '\n';
      return suppressed;
    }
    const auto etf = std::make_shared<const FlowField>(compute_etf(*l.image));
    PipelineInputs p = infer_constraints(*ex, *l.image, etf, l.doc.params);
    report["region_area"] = p.region.area();
    report["orientation"] = to_string(p.orientation.mode);
    report["radius_mode"] = to_string(p.radius.mode);
    report["triple"] = p.radius.params;
    report["r_squared"] = p.fit ? json(p.fit->r_squared) : json(nullptr);
    report["mean_nn"] = p.fit ? json(p.fit->mean_nn) : json(nullptr);
    out << report.dump() << '\n';
    return ok;
  } catch (const Error& e) {
    err << "autostroke: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "autostroke: " << e.what() << '\n';
    return failure;
  }
}

inline int cmd_render(const RenderCmdOptions& o, std::ostream& err) {
  try {
    const Document doc = load_document(o.document);
    int w = 0, h = 0;
    if (o.size) {
      std::tie(w, h) = *o.size;
    } else {
      std::string image = o.image.value_or(doc.image.empty() ? "" : resolve_path(o.document, doc.image));
      if (image.empty() || !std::filesystem::exists(image))
        throw Error(ErrorCode::io, "canvas size unknown: reference image missing and no --size given");
      const Raster<Rgba8> ref = read_png(image);
      w = ref.width();
      h = ref.height();
    }
    if (w <= 0 || h <= 0) throw Error(ErrorCode::invalid_argument, "canvas size must be positive");
    const RenderOptions ro{o.provenance, {}};
    const std::string ext = std::filesystem::path(o.out).extension().string();
    if (ext == ".svg") {
      std::ofstream f(o.out, std::ios::binary);
      if (!f) throw Error(ErrorCode::io, "cannot write '" + o.out + "'");
      f << render_svg(doc, w, h, ro);
    } else if (ext == ".png") {
      write_png(o.out, render_raster(doc, w, h, ro));
    } else {
      throw Error(ErrorCode::invalid_argument, "output must end in .png or .svg");
    }
    return ok;
  } catch (const Error& e) {
    err << "autostroke: " << e.what() << '\n';
    return failure;
  } catch (const std::exception& e) {
    err << "autostroke: " << e.what() << '\n';
    return failure;
  }
}

}  // namespace autostroke::cli
