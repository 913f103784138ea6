#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "autostroke/error.hpp"
#include "autostroke/stroke.hpp"

namespace autostroke {

using json = nlohmann::json;

inline const char* to_string(StrokeSource s) {
  return s == StrokeSource::manual ? "manual" : "autocompleted";
}

inline StrokeSource stroke_source_from_string(const std::string& s) {
  if (s == "manual") return StrokeSource::manual;
  if (s == "autocompleted") return StrokeSource::autocompleted;
  throw Error(ErrorCode::decode, "unknown stroke source '" + s + "'");
}

inline void to_json(json& j, const GroupingParams& p) {
  j = json{{"color_std_threshold", p.color_std_threshold},
           {"segmentation_std_threshold", p.segmentation_std_threshold},
           {"k_max", p.k_max},
           {"lab_weights", p.lab_weights},
           {"frechet_rel_threshold", p.frechet_rel_threshold},
           {"feature_patch", p.feature_patch}};
}

inline void from_json(const json& j, GroupingParams& p) {
  const GroupingParams d;
  p.color_std_threshold = j.value("color_std_threshold", d.color_std_threshold);
  p.segmentation_std_threshold = j.value("segmentation_std_threshold", d.segmentation_std_threshold);
  p.k_max = j.value("k_max", d.k_max);
  p.lab_weights = j.value("lab_weights", d.lab_weights);
  p.frechet_rel_threshold = j.value("frechet_rel_threshold", d.frechet_rel_threshold);
  p.feature_patch = j.value("feature_patch", d.feature_patch);
}

inline void to_json(json& j, const SynthesisParams& p) {
  j = json{{"iterations", p.iterations},
           {"mu", p.mu},
           {"n_in", p.n_in},
           {"n_out", p.n_out},
           {"unmatched_penalty", p.unmatched_penalty},
           {"direction_anchor_weight", p.direction_anchor_weight},
           {"poisson_attempts", p.poisson_attempts},
           {"cg_tolerance", p.cg_tolerance},
           {"cg_max_iterations", p.cg_max_iterations},
           {"seed", p.seed}};
}

inline void from_json(const json& j, SynthesisParams& p) {
  const SynthesisParams d;
  p.iterations = j.value("iterations", d.iterations);
  p.mu = j.value("mu", d.mu);
  p.n_in = j.value("n_in", d.n_in);
  p.n_out = j.value("n_out", d.n_out);
  p.unmatched_penalty = j.value("unmatched_penalty", d.unmatched_penalty);
  p.direction_anchor_weight = j.value("direction_anchor_weight", d.direction_anchor_weight);
  p.poisson_attempts = j.value("poisson_attempts", d.poisson_attempts);
  p.cg_tolerance = j.value("cg_tolerance", d.cg_tolerance);
  p.cg_max_iterations = j.value("cg_max_iterations", d.cg_max_iterations);
  p.seed = j.value("seed", d.seed);
}

inline void to_json(json& j, const Params& p) {
  j = json{{"grouping", p.grouping},
           {"synthesis", p.synthesis},
           {"autocomplete", p.autocomplete},
           {"autocolor", p.autocolor}};
}

inline void from_json(const json& j, Params& p) {
  const Params d;
  p.grouping = j.value("grouping", d.grouping);
  p.synthesis = j.value("synthesis", d.synthesis);
  p.autocomplete = j.value("autocomplete", d.autocomplete);
  p.autocolor = j.value("autocolor", d.autocolor);
}

inline void to_json(json& j, const DensityTriple& t) {
  j = json::array({t.spacing, t.lightness_coeff, t.gradient_coeff});
}

inline void from_json(const json& j, DensityTriple& t) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::decode, "density triple must be [spacing, lightness, gradient]");
  t = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline void to_json(json& j, const Stroke& s) {
  json pts = json::array();
  for (const auto& p : s.points) pts.push_back(json::array({p.x, p.y, p.t, p.pressure}));
  j = json{{"id", s.id},
           {"width", s.width},
           {"color", json::array({s.color.r, s.color.g, s.color.b, s.color.a})},
           {"source", to_string(s.source)},
           {"points", std::move(pts)}};
  if (s.suggestion) j["suggestion"] = *s.suggestion;
}

inline void from_json(const json& j, Stroke& s) {
  s.id = j.at("id").get<StrokeId>();
  s.width = j.at("width").get<double>();
  const auto& c = j.at("color");
  if (!c.is_array() || c.size() != 4) throw Error(ErrorCode::decode, "stroke color must be [r,g,b,a]");
  s.color = {c[0].get<std::uint8_t>(), c[1].get<std::uint8_t>(), c[2].get<std::uint8_t>(), c[3].get<std::uint8_t>()};
  s.source = stroke_source_from_string(j.value("source", std::string("manual")));
  s.points.clear();
  for (const auto& p : j.at("points")) {
    if (!p.is_array() || p.size() < 2) throw Error(ErrorCode::decode, "stroke point must be [x,y,t,pressure]");
    StrokePoint sp;
    sp.x = p[0].get<double>();
    sp.y = p[1].get<double>();
    sp.t = p.size() > 2 ? p[2].get<double>() : 0.0;
    sp.pressure = p.size() > 3 ? p[3].get<double>() : 1.0;
    s.points.push_back(sp);
  }
  s.suggestion.reset();
  if (j.contains("suggestion")) s.suggestion = j["suggestion"].get<std::uint64_t>();
}

inline void to_json(json& j, const Layer& l) {
  j = json{{"id", l.id}, {"name", l.name}, {"strokes", l.strokes}};
}

inline void from_json(const json& j, Layer& l) {
  l.id = j.at("id").get<LayerId>();
  l.name = j.value("name", std::string());
  l.strokes = j.value("strokes", std::vector<Stroke>{});
}

inline void to_json(json& j, const Document& d) {
  j = json{{"version", d.version}, {"image", d.image}, {"layers", d.layers}, {"params", d.params}};
  if (d.labels) j["labels"] = *d.labels;
}

inline void from_json(const json& j, Document& d) {
  d.version = j.at("version").get<int>();
  if (d.version != 1) throw Error(ErrorCode::decode, "unsupported document version " + std::to_string(d.version));
  d.image = j.value("image", std::string());
  d.labels.reset();
  if (j.contains("labels") && !j["labels"].is_null()) d.labels = j["labels"].get<std::string>();
  d.layers = j.value("layers", std::vector<Layer>{});
  d.params = j.value("params", Params{});
}

inline std::string serialize(const Document& doc) { return json(doc).dump(); }

inline Document deserialize(std::string_view text) {
  try {
    Document doc = json::parse(text).get<Document>();
    validate(doc);
    return doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::decode, std::string("malformed document: ") + e.what());
  }
}

inline Document load_document(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open document '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

inline void save_document(const Document& doc, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write document '" + path + "'");
  out << serialize(doc) << '\n';
}

}  // namespace autostroke
