#pragma once

#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "autostroke/document_io.hpp"
#include "autostroke/session.hpp"

namespace autostroke {

// Frames are single-line JSON objects with a "type" and a "seq". Replies echo
// the seq of the request; pipeline results carry the seq of the message that
// triggered them.

inline json mask_to_json(const RegionMask& m) {
  return json{{"w", m.width()}, {"h", m.height()}, {"rle", encode_mask_rle(m)}};
}

inline RegionMask mask_from_json(const json& j) {
  const int w = j.at("w").get<int>();
  const int h = j.at("h").get<int>();
  return decode_mask_rle(w, h, j.at("rle").get<std::string>());
}

inline json suggestion_to_json(const SuggestionSet& s) {
  json j{{"id", s.id},
         {"layer", s.layer},
         {"strokes", s.strokes},
         {"mask", mask_to_json(s.region)},
         {"exemplar_ids", s.exemplar_ids},
         {"triple", s.triple},
         {"radius_mode", to_string(s.radius_mode)},
         {"orientation", to_string(s.orientation)},
         {"state", to_string(s.state)}};
  j["r_squared"] = s.r_squared ? json(*s.r_squared) : json(nullptr);
  return j;
}

inline std::vector<Vec2> points_from_json(const json& j) {
  std::vector<Vec2> out;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() < 2) throw Error(ErrorCode::protocol, "points must be [x, y] pairs");
    out.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return out;
}

/// Stroke as sent by the client: id and source are ignored, width and
/// color default.
inline Stroke incoming_stroke(const json& j) {
  json full = j;
  full["id"] = 0;
  if (!full.contains("width")) full["width"] = 2.0;
  if (!full.contains("color")) full["color"] = json::array({0, 0, 0, 255});
  full.erase("suggestion");
  full["source"] = "manual";
  return full.get<Stroke>();
}

inline OrientationMode orientation_from_string(const std::string& s) {
  if (s == "global") return OrientationMode::global;
  if (s == "flow") return OrientationMode::flow;
  throw Error(ErrorCode::protocol, "unknown orientation mode '" + s + "'");
}

inline RegionEditOp region_op_from_string(const std::string& s) {
  if (s == "create") return RegionEditOp::create;
  if (s == "add") return RegionEditOp::add;
  if (s == "subtract") return RegionEditOp::subtract;
  if (s == "expand") return RegionEditOp::expand;
  throw Error(ErrorCode::protocol, "unknown region op '" + s + "'");
}

/// Connects one session to one client. `push` receives frames produced
/// asynchronously by the pipeline and may be called from the worker thread.
class ProtocolHandler {
 public:
  using Push = std::function<void(std::string)>;

  ProtocolHandler(Session& session, Push push, std::optional<std::string> save_path = std::nullopt)
      : session_(session), push_(std::move(push)), save_path_(std::move(save_path)) {
    session_.set_listener([this](const PipelineEvent& e) { push_(event_frame(e).dump()); });
  }
  ~ProtocolHandler() { session_.set_listener({}); }

  json hello() const { return json{{"type", "hello"}, {"seq", 0}, {"document", session_.document()}}; }

  /// Handles one client frame and returns the immediate replies. Never
  /// throws: failures become error frames and leave the session untouched.
  std::vector<std::string> handle(std::string_view text) {
    std::vector<std::string> out;
    json seq = nullptr;
    try {
      json msg;
      try {
        msg = json::parse(text);
      } catch (const json::exception& e) {
        throw Error(ErrorCode::protocol, std::string("malformed frame: ") + e.what());
      }
      if (!msg.is_object()) throw Error(ErrorCode::protocol, "frame must be a JSON object");
      if (msg.contains("seq")) seq = msg["seq"];
      if (!msg.contains("type") || !msg["type"].is_string()) throw Error(ErrorCode::protocol, "frame has no type");
      dispatch(msg, seq, out);
    } catch (const Error& e) {
      out.push_back(error_frame(seq, to_string(e.code()), e.what()).dump());
    } catch (const json::exception& e) {
      out.push_back(error_frame(seq, "protocol", std::string("bad field: ") + e.what()).dump());
    }
    return out;
  }

 private:
  static json error_frame(const json& seq, const std::string& code, const std::string& message) {
    return json{{"type", "error"}, {"seq", seq}, {"code", code}, {"message", message}};
  }

  static json committed(const json& seq, const std::string& op, const std::vector<StrokeId>& ids) {
    return json{{"type", "committed"}, {"seq", seq}, {"op", op}, {"ids", ids}};
  }

  json event_frame(const PipelineEvent& e) {
    json seq;
    {
      std::lock_guard lock(seq_mutex_);
      seq = trigger_seq_;
    }
    if (e.suggestion) return json{{"type", "suggestion"}, {"seq", seq}, {"suggestion", suggestion_to_json(*e.suggestion)}};
    return json{{"type", "no_suggestion"}, {"seq", seq}, {"reason", e.reason}};
  }

  void triggered(const json& seq) {
    std::lock_guard lock(seq_mutex_);
    trigger_seq_ = seq;
  }

  void dispatch(const json& msg, const json& seq, std::vector<std::string>& out) {
    const std::string type = msg["type"].get<std::string>();
    if (type == "stroke_added") {
      Stroke s = incoming_stroke(msg.at("stroke"));
      triggered(seq);
      const bool autocomplete = session_.document().params.autocomplete;
      const StrokeId id = session_.submit_stroke(std::move(s));
      out.push_back(committed(seq, type, {id}).dump());
      if (!autocomplete)
        out.push_back(json{{"type", "no_suggestion"}, {"seq", seq}, {"reason", "autocomplete off"}}.dump());
    } else if (type == "resolve") {
      const std::string d = msg.at("decision").get<std::string>();
      std::vector<StrokeId> ids;
      if (d == "accept_all") {
        ids = session_.resolve(Decision::accept_all);
      } else if (d == "reject_all") {
        ids = session_.resolve(Decision::reject_all);
      } else if (d == "accept_lasso") {
        const auto poly = points_from_json(msg.at("polygon"));
        ids = session_.resolve(Decision::accept_lasso, poly);
      } else {
        throw Error(ErrorCode::protocol, "unknown decision '" + d + "'");
      }
      json frame = committed(seq, type, ids);
      frame["strokes"] = json::array();
      for (StrokeId id : ids)
        if (const Stroke* st = session_.document().find_stroke(id)) frame["strokes"].push_back(*st);
      out.push_back(frame.dump());
    } else if (type == "set_params") {
      triggered(seq);
      session_.set_params(msg.at("triple").get<DensityTriple>());
      out.push_back(committed(seq, type, {}).dump());
    } else if (type == "edit_region") {
      const RegionEditOp op = region_op_from_string(msg.at("op").get<std::string>());
      triggered(seq);
      if (op == RegionEditOp::expand) session_.edit_region(op, msg.at("width").get<double>());
      else session_.edit_region(op, points_from_json(msg.at("polygon")));
      out.push_back(committed(seq, type, {}).dump());
    } else if (type == "edit_orientation") {
      triggered(seq);
      if (msg.contains("gesture")) {
        const auto g = points_from_json(msg["gesture"]);
        session_.edit_orientation(g, msg.value("brush", 10.0));
      } else {
        session_.edit_orientation(orientation_from_string(msg.at("mode").get<std::string>()));
      }
      out.push_back(committed(seq, type, {}).dump());
    } else if (type == "toggle_autocomplete") {
      session_.set_autocomplete(msg.value("on", !session_.document().params.autocomplete));
      out.push_back(committed(seq, type, {}).dump());
    } else if (type == "toggle_autocolor") {
      session_.set_autocolor(msg.value("on", !session_.document().params.autocolor));
      out.push_back(committed(seq, type, {}).dump());
    } else if (type == "post_edit") {
      const auto ids = msg.at("ids").get<std::vector<StrokeId>>();
      if (msg.contains("width")) {
        session_.post_edit(ids, EditProperty::width, msg["width"].get<double>());
      } else if (msg.contains("color")) {
        const auto c = msg["color"].get<std::vector<int>>();
        if (c.size() != 4) throw Error(ErrorCode::protocol, "color must be [r,g,b,a]");
        for (int v : c)
          if (v < 0 || v > 255) throw Error(ErrorCode::protocol, "color channel out of range");
        session_.post_edit(ids, EditProperty::color,
                           Rgba{static_cast<std::uint8_t>(c[0]), static_cast<std::uint8_t>(c[1]),
                                static_cast<std::uint8_t>(c[2]), static_cast<std::uint8_t>(c[3])});
      } else {
        throw Error(ErrorCode::protocol, "post_edit needs width or color");
      }
      out.push_back(committed(seq, type, ids).dump());
    } else if (type == "undo" || type == "redo") {
      if (type == "undo") session_.undo();
      else session_.redo();
      out.push_back(committed(seq, type, {}).dump());
      out.push_back(json{{"type", "hello"}, {"seq", seq}, {"document", session_.document()}}.dump());
    } else if (type == "batch_fill") {
      PipelineOverrides o;
      if (msg.contains("triple")) o.triple = msg["triple"].get<DensityTriple>();
      if (msg.contains("region")) o.region = mask_from_json(msg["region"]);
      if (msg.contains("orientation")) o.orientation = orientation_from_string(msg["orientation"].get<std::string>());
      triggered(seq);
      session_.batch_fill(msg.value("ids", std::vector<StrokeId>{}), std::move(o));
      out.push_back(committed(seq, type, {}).dump());
    } else if (type == "save") {
      if (!save_path_) throw Error(ErrorCode::io, "session has no document path");
      session_.save(*save_path_);
      out.push_back(committed(seq, type, {}).dump());
    } else {
      throw Error(ErrorCode::protocol, "unknown frame type '" + type + "'");
    }
  }

  Session& session_;
  Push push_;
  std::optional<std::string> save_path_;
  std::mutex seq_mutex_;
  json trigger_seq_ = nullptr;
};

}  // namespace autostroke
