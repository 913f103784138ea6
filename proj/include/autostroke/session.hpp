#pragma once

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stop_token>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "autostroke/document_io.hpp"
#include "autostroke/pipeline.hpp"

namespace autostroke {

enum class SuggestionState { pending, superseded, resolved };

inline const char* to_string(SuggestionState s) {
  switch (s) {
    case SuggestionState::pending: return "pending";
    case SuggestionState::superseded: return "superseded";
    case SuggestionState::resolved: return "resolved";
  }
  return "unknown";
}

/// Synthesized strokes waiting for the user's decision. Stroke ids and
/// timestamps are reserved when the set is published, so committing any
/// subset in any order yields the same document as accepting everything.
struct SuggestionSet {
  std::uint64_t id = 0;
  LayerId layer = 0;
  std::vector<Stroke> strokes;
  std::vector<StrokeId> exemplar_ids;
  RegionMask region;
  DensityTriple triple;
  RadiusMode radius_mode = RadiusMode::constant;
  std::optional<double> r_squared;
  OrientationMode orientation = OrientationMode::global;
  SuggestionState state = SuggestionState::pending;
};

enum class HistoryKind {
  add_stroke,
  accept_suggestions,
  reject_suggestions,
  edit_params,
  edit_region,
  edit_orientation,
  post_edit,
  toggle_autocomplete,
  toggle_autocolor,
  add_layer,
  undo,
  redo,
};

struct HistoryOp {
  HistoryKind kind;
  std::vector<StrokeId> strokes;  // strokes the op touched, if any
};

enum class Decision { accept_all, reject_all, accept_lasso };

enum class EditProperty { width, color };
using EditValue = std::variant<double, Rgba>;

/// Outcome of one pipeline run, delivered to the listener from the worker.
struct PipelineEvent {
  std::uint64_t generation = 0;
  std::optional<SuggestionSet> suggestion;  // empty: no suggestion
  std::string reason;
};

class Session {
 public:
  using Listener = std::function<void(const PipelineEvent&)>;

  Session(Document doc, std::shared_ptr<const ReferenceImage> image)
      : doc_(std::move(doc)), image_(std::move(image)), etf_(std::make_shared<FlowField>(compute_etf(*image_))) {
    validate(doc_);
    if (doc_.layers.empty()) doc_.layers.push_back(Layer{1, "Layer 1", {}});
    active_layer_ = doc_.layers.back().id;
    snapshots_.push_back({doc_, active_layer_, std::nullopt});
    worker_ = std::jthread([this](std::stop_token st) { work(st); });
  }

  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;
  ~Session() {
    cancel_pipeline();
    worker_.request_stop();
    cv_.notify_all();
  }

  const Document& document() const { return doc_; }
  const ReferenceImage& image() const { return *image_; }
  std::shared_ptr<const FlowField> flow_field() const { return etf_; }
  LayerId active_layer() const { return active_layer_; }
  const std::vector<HistoryOp>& log() const { return log_; }
  std::size_t undo_pointer() const { return cursor_; }

  /// Replaces the listener; returns only after any running callback ends.
  void set_listener(Listener l) {
    std::lock_guard call(listener_mutex_);
    std::lock_guard lock(mutex_);
    listener_ = std::move(l);
  }

  std::optional<SuggestionSet> pending() const {
    std::lock_guard lock(mutex_);
    return pending_;
  }

  /// Appends a manual stroke and, in autocomplete mode, starts the
  /// suggestion pipeline in the background. Returns the new stroke id.
  StrokeId submit_stroke(Stroke stroke) {
    validate(stroke);
    cancel_pipeline();
    stroke.id = next_stroke_id();
    stroke.source = StrokeSource::manual;
    stroke.suggestion.reset();
    if (doc_.params.autocolor) stroke.color = reference_color(stroke);
    layer().strokes.push_back(stroke);
    commit(HistoryKind::add_stroke, {stroke.id});
    if (doc_.params.autocomplete) {
      Job job = base_job();
      for (const auto& s : layer().strokes)
        if (s.source == StrokeSource::manual) job.history.push_back(s);
      enqueue(std::move(job));
    }
    return stroke.id;
  }

  /// submit_stroke, then waits for the pipeline and returns its outcome.
  std::optional<SuggestionSet> handle_stroke(Stroke stroke) {
    submit_stroke(std::move(stroke));
    wait_idle();
    return pending();
  }

  /// Blocks until no pipeline job is queued or running.
  void wait_idle() {
    std::unique_lock lock(mutex_);
    idle_cv_.wait(lock, [&] { return !busy_ && !queued_; });
  }

  /// Applies a decision to the pending set and returns the committed ids.
  std::vector<StrokeId> resolve(Decision decision, std::span<const Vec2> lasso = {}) {
    std::optional<SuggestionSet> set;
    {
      std::lock_guard lock(mutex_);
      set = pending_;
    }
    if (!set) return {};
    if (decision == Decision::reject_all) {
      {
        std::lock_guard lock(mutex_);
        pending_->state = SuggestionState::resolved;
        pending_.reset();
      }
      commit(HistoryKind::reject_suggestions, {});
      return {};
    }
    if (decision == Decision::accept_lasso && lasso.size() < 3)
      throw Error(ErrorCode::invalid_argument, "lasso needs at least three points");
    std::vector<Stroke> take, keep;
    for (const auto& s : set->strokes) {
      const bool inside = decision == Decision::accept_all || point_in_polygon(summarize(s).centroid, lasso);
      (inside ? take : keep).push_back(s);
    }
    if (take.empty()) return {};
    Layer* target = doc_.find_layer(set->layer);
    if (!target) throw Error(ErrorCode::invalid_argument, "suggestion layer no longer exists");
    std::vector<StrokeId> ids;
    for (auto& s : take) {
      ids.push_back(s.id);
      target->strokes.push_back(std::move(s));
    }
    std::stable_sort(target->strokes.begin(), target->strokes.end(),
                     [](const Stroke& a, const Stroke& b) { return a.id < b.id; });
    {
      std::lock_guard lock(mutex_);
      if (keep.empty()) {
        pending_.reset();
      } else {
        pending_->strokes = std::move(keep);
      }
    }
    commit(HistoryKind::accept_suggestions, ids);
    return ids;
  }

  void undo() {
    if (cursor_ == 0) throw Error(ErrorCode::history_boundary, "nothing to undo");
    cancel_pipeline();
    restore(--cursor_);
    log_.push_back({HistoryKind::undo, {}});
  }

  void redo() {
    if (cursor_ + 1 >= snapshots_.size()) throw Error(ErrorCode::history_boundary, "nothing to redo");
    cancel_pipeline();
    restore(++cursor_);
    log_.push_back({HistoryKind::redo, {}});
  }

  bool can_undo() const { return cursor_ > 0; }
  bool can_redo() const { return cursor_ + 1 < snapshots_.size(); }

  void set_autocomplete(bool on) {
    if (doc_.params.autocomplete == on) return;
    doc_.params.autocomplete = on;
    if (!on) cancel_pipeline();
    commit(HistoryKind::toggle_autocomplete, {});
  }

  void set_autocolor(bool on) {
    if (doc_.params.autocolor == on) return;
    doc_.params.autocolor = on;
    commit(HistoryKind::toggle_autocolor, {});
  }

  /// Recolors the given strokes from the reference at their centroids when
  /// autocolor is on; returns the strokes as stored afterwards.
  std::vector<Stroke> autocolor(std::span<const StrokeId> ids) {
    std::vector<Stroke> out;
    if (!doc_.params.autocolor || ids.empty()) {
      for (StrokeId id : ids) out.push_back(require_stroke(id));
      return out;
    }
    for (StrokeId id : ids) require_stroke(id);
    for (StrokeId id : ids) {
      Stroke& s = require_stroke(id);
      s.color = reference_color(s);
      out.push_back(s);
    }
    commit(HistoryKind::post_edit, {ids.begin(), ids.end()});
    return out;
  }

  /// Batch width or color change as one undo unit. Empty selection is a no-op.
  void post_edit(std::span<const StrokeId> ids, EditProperty property, const EditValue& value) {
    if (ids.empty()) return;
    if (property == EditProperty::width) {
      const double* w = std::get_if<double>(&value);
      if (!w || !(*w > 0.0) || !std::isfinite(*w)) throw Error(ErrorCode::invalid_argument, "width must be positive");
    } else if (!std::holds_alternative<Rgba>(value)) {
      throw Error(ErrorCode::invalid_argument, "color edit needs an RGBA value");
    }
    for (StrokeId id : ids) require_stroke(id);
    for (StrokeId id : ids) {
      Stroke& s = require_stroke(id);
      if (property == EditProperty::width) s.width = std::get<double>(value);
      else s.color = std::get<Rgba>(value);
    }
    commit(HistoryKind::post_edit, {ids.begin(), ids.end()});
  }

  LayerId add_layer(std::string name) {
    const LayerId id = doc_.next_layer_id();
    doc_.layers.push_back(Layer{id, std::move(name), {}});
    active_layer_ = id;
    cancel_pipeline();
    commit(HistoryKind::add_layer, {});
    return id;
  }

  void set_active_layer(LayerId id) {
    if (!doc_.find_layer(id)) throw Error(ErrorCode::invalid_argument, "unknown layer " + std::to_string(id));
    active_layer_ = id;
  }

  /// Replaces the density triple of the current suggestion and re-runs
  /// synthesis on the same exemplar and region.
  void set_params(const DensityTriple& triple) {
    PipelineInputs in = require_basis();
    in.radius = radius_from_params(*image_, triple);
    in.fit.reset();
    resynthesize(std::move(in), HistoryKind::edit_params);
  }

  void edit_region(RegionEditOp op, const RegionEditShape& shape) {
    PipelineInputs in = require_basis();
    in.region = autostroke::edit_region(in.region, op, shape);
    resynthesize(std::move(in), HistoryKind::edit_region);
  }

  void edit_orientation(OrientationMode mode) {
    PipelineInputs in = require_basis();
    in.orientation.mode = mode;
    if (!in.orientation.field) in.orientation.field = etf_;
    resynthesize(std::move(in), HistoryKind::edit_orientation);
  }

  /// Paints the flow field along a gesture and switches to flow mode.
  void edit_orientation(std::span<const Vec2> gesture, double brush_radius) {
    PipelineInputs in = require_basis();
    const FlowField& base = in.orientation.field ? *in.orientation.field : *etf_;
    in.orientation.field =
        std::make_shared<FlowField>(apply_gesture(base, gesture, brush_radius, image_->width(), image_->height()));
    in.orientation.mode = OrientationMode::flow;
    resynthesize(std::move(in), HistoryKind::edit_orientation);
  }

  /// Runs the pipeline on demand with manual settings (batch mode). An
  /// empty id list uses the repetition group ending at the last manual stroke.
  void batch_fill(std::vector<StrokeId> exemplar_ids = {}, PipelineOverrides overrides = {}) {
    cancel_pipeline();
    Job job = base_job();
    job.overrides = std::move(overrides);
    if (exemplar_ids.empty()) {
      for (const auto& s : layer().strokes)
        if (s.source == StrokeSource::manual) job.history.push_back(s);
    } else {
      std::vector<Stroke> strokes;
      for (StrokeId id : exemplar_ids) strokes.push_back(require_stroke(id));
      job.explicit_exemplar = std::move(strokes);
    }
    enqueue(std::move(job));
  }

  void save(const std::string& path) const { save_document(doc_, path); }

 private:
  struct Snapshot {
    Document doc;
    LayerId active;
    std::optional<PipelineInputs> basis;
  };

  struct Job {
    std::uint64_t generation = 0;
    LayerId layer = 0;
    Params params;
    std::vector<Stroke> history;
    std::vector<Stroke> existing;
    std::optional<std::vector<Stroke>> explicit_exemplar;
    std::optional<PipelineInputs> basis;
    PipelineOverrides overrides;
    double base_time = 0.0;
    StrokeId base_id = 1;
  };

  Layer& layer() {
    Layer* l = doc_.find_layer(active_layer_);
    if (!l) throw Error(ErrorCode::invalid_argument, "active layer missing");
    return *l;
  }

  Stroke& require_stroke(StrokeId id) {
    Stroke* s = doc_.find_stroke(id);
    if (!s) throw Error(ErrorCode::invalid_argument, "unknown stroke " + std::to_string(id));
    return *s;
  }

  Rgba reference_color(const Stroke& s) const {
    const auto [x, y] = image_->pixel_of(summarize(s).centroid);
    const Rgb8 c = image_->rgb(x, y);
    return {c[0], c[1], c[2], s.color.a};
  }

  StrokeId next_stroke_id() {
    std::lock_guard lock(mutex_);
    return std::max(doc_.next_stroke_id(), id_floor_);
  }

  PipelineInputs require_basis() {
    std::lock_guard lock(mutex_);
    if (!basis_) throw Error(ErrorCode::invalid_argument, "no suggestion to edit");
    return *basis_;
  }

  void resynthesize(PipelineInputs in, HistoryKind kind) {
    cancel_pipeline();
    {
      std::lock_guard lock(mutex_);
      basis_ = in;
    }
    commit(kind, {});
    Job job = base_job();
    job.basis = std::move(in);
    enqueue(std::move(job));
  }

  Job base_job() {
    Job job;
    job.layer = active_layer_;
    job.params = doc_.params;
    job.existing = layer().strokes;
    job.base_time = doc_.max_time();
    job.base_id = next_stroke_id();
    return job;
  }

  /// Drops redo states and records the current document as a new state.
  void commit(HistoryKind kind, std::vector<StrokeId> strokes) {
    snapshots_.resize(cursor_ + 1);
    std::optional<PipelineInputs> basis;
    {
      std::lock_guard lock(mutex_);
      basis = basis_;
    }
    snapshots_.push_back({doc_, active_layer_, std::move(basis)});
    ++cursor_;
    log_.push_back({kind, std::move(strokes)});
  }

  void restore(std::size_t index) {
    const Snapshot& s = snapshots_[index];
    doc_ = s.doc;
    active_layer_ = s.active;
    std::lock_guard lock(mutex_);
    basis_ = s.basis;
  }

  /// Supersedes the pending set and any queued or running job.
  void cancel_pipeline() {
    std::lock_guard lock(mutex_);
    ++generation_;
    queued_.reset();
    running_stop_.request_stop();
    if (pending_) {
      pending_->state = SuggestionState::superseded;
      pending_.reset();
    }
  }

  void enqueue(Job job) {
    {
      std::lock_guard lock(mutex_);
      job.generation = ++generation_;
      running_stop_.request_stop();
      queued_ = std::move(job);
    }
    cv_.notify_all();
  }

  void work(std::stop_token st) {
    std::unique_lock lock(mutex_);
    while (true) {
      cv_.wait(lock, st, [&] { return queued_.has_value(); });
      if (st.stop_requested()) return;
      Job job = std::move(*queued_);
      queued_.reset();
      busy_ = true;
      running_stop_ = std::stop_source();
      const std::stop_token job_stop = running_stop_.get_token();
      lock.unlock();

      std::optional<PipelineInputs> inputs;
      std::optional<PipelineEvent> event = run(job, job_stop, inputs);

      lock.lock();
      busy_ = false;
      if (event && job.generation == generation_) {
        event->generation = job.generation;
        if (inputs) basis_ = std::move(inputs);
        if (event->suggestion) {
          id_floor_ = std::max(id_floor_, job.base_id + event->suggestion->strokes.size());
          pending_ = event->suggestion;
        }
        if (listener_) {
          lock.unlock();
          {
            std::lock_guard call(listener_mutex_);
            if (listener_) listener_(*event);
          }
          lock.lock();
        }
      }
      if (!queued_) idle_cv_.notify_all();
    }
  }

  /// The pipeline proper; nullopt when cancelled.
  std::optional<PipelineEvent> run(const Job& job, std::stop_token stop, std::optional<PipelineInputs>& inputs) const {
    PipelineEvent event;
    try {
      if (job.basis) {
        inputs = job.basis;
      } else if (job.explicit_exemplar) {
        inputs = infer_constraints(exemplar_from_strokes(*job.explicit_exemplar, *image_, job.params.grouping),
                                   *image_, etf_, job.params, job.overrides, stop);
      } else {
        inputs = infer_inputs(job.history, *image_, etf_, job.params, job.overrides, stop);
        if (!inputs) {
          event.reason = "no exemplar";
          return event;
        }
      }
      const SynthesisResult result =
          synthesize(make_context(*inputs, image_, job.existing, job.params.synthesis), stop);

      SuggestionSet set;
      set.id = job.generation;
      set.layer = job.layer;
      for (const auto& s : inputs->exemplar.strokes) set.exemplar_ids.push_back(s.id);
      set.region = inputs->region;
      set.triple = inputs->radius.params;
      set.radius_mode = inputs->radius.mode;
      if (inputs->fit) set.r_squared = inputs->fit->r_squared;
      set.orientation = inputs->orientation.mode;
      double t = job.base_time;
      StrokeId id = job.base_id;
      for (Stroke s : result.strokes) {
        s.id = id++;
        s.suggestion = set.id;
        if (job.params.autocolor) s.color = reference_color(s);
        const double t0 = s.points.front().t;
        for (auto& p : s.points) p.t = t + 1.0 + (p.t - t0);
        t = s.points.back().t;
        set.strokes.push_back(std::move(s));
      }
      event.suggestion = std::move(set);
      return event;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::cancelled) return std::nullopt;
      event.reason = e.what();
      return event;
    }
  }

  Document doc_;
  std::shared_ptr<const ReferenceImage> image_;
  std::shared_ptr<const FlowField> etf_;
  LayerId active_layer_ = 0;
  std::vector<Snapshot> snapshots_;
  std::size_t cursor_ = 0;
  std::vector<HistoryOp> log_;

  mutable std::mutex mutex_;
  std::mutex listener_mutex_;
  std::condition_variable_any cv_;
  std::condition_variable_any idle_cv_;
  std::optional<Job> queued_;
  std::stop_source running_stop_;
  bool busy_ = false;
  std::uint64_t generation_ = 0;
  StrokeId id_floor_ = 1;
  std::optional<SuggestionSet> pending_;
  std::optional<PipelineInputs> basis_;
  Listener listener_;
  std::jthread worker_;
};

}  // namespace autostroke
