#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <stop_token>
#include <unordered_set>
#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include "autostroke/constraints.hpp"
#include "autostroke/exemplar.hpp"
#include "autostroke/image.hpp"
#include "autostroke/mask.hpp"
#include "autostroke/neighborhood.hpp"
#include "autostroke/params.hpp"
#include "autostroke/poisson_disk.hpp"
#include "autostroke/voronoi.hpp"

namespace autostroke {

/// The four synthesis inputs plus the layer's other strokes and tunables.
struct SynthesisContext {
  Exemplar exemplar;
  std::shared_ptr<const ReferenceImage> image;
  RegionMask mask;
  OrientationMap orientation;
  RadiusMap radius;
  std::vector<Stroke> existing_strokes;  // same layer
  SynthesisParams params;
  bool correction_term = true;  // false pins w = 0 (ablation)
};

/// Output strokes as summaries plus the exemplar stroke each one copies.
struct OutputState {
  std::vector<StrokeSummary> summaries;
  std::vector<int> sources;
  std::size_t size() const { return summaries.size(); }
};

struct IterationRecord {
  int iteration = 0;
  double w = 0.0;
  double objective_before = 0.0;  // least-squares objective at the warm start
  double objective_after = 0.0;
  double phi_neigh = 0.0;
  double phi_corr = 0.0;
};

struct SynthesisResult {
  std::vector<Stroke> strokes;
  OutputState state;  // final summaries, aligned with `strokes`
  RegionMask working_mask;
  std::vector<IterationRecord> iterations;
};

struct EnergyBreakdown {
  double neigh = 0.0;
  double corr = 0.0;
  double total = 0.0;
};

/// w(i) = (i / m)^2.
inline double schedule_weight(int i, int m) {
  const double r = static_cast<double>(i) / static_cast<double>(m);
  return r * r;
}

namespace detail {

/// Nearest in-mask pixel for every pixel, by multi-source BFS.
class NearestPixelMap {
 public:
  explicit NearestPixelMap(const RegionMask& mask) : mask_(&mask), nearest_(mask.width(), mask.height(), -1) {
    const int w = mask.width();
    std::vector<int> queue;
    for (int y = 0; y < mask.height(); ++y)
      for (int x = 0; x < w; ++x)
        if (mask.at(x, y)) { nearest_(x, y) = y * w + x; queue.push_back(y * w + x); }
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const int x = queue[qi] % w;
      const int y = queue[qi] / w;
      const int src = nearest_(x, y);
      const Vec2 sp{src % w + 0.5, src / w + 0.5};
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (!nearest_.contains(nx, ny)) continue;
          int& cur = nearest_(nx, ny);
          if (cur < 0) {
            cur = src;
            queue.push_back(ny * w + nx);
          } else if (!mask.at(nx, ny)) {
            const Vec2 np{nx + 0.5, ny + 0.5};
            const Vec2 cp{cur % w + 0.5, cur / w + 0.5};
            if (squared_distance(np, sp) < squared_distance(np, cp)) cur = src;
          }
        }
      }
    }
  }

  /// p itself when inside the mask, else the center of the nearest mask pixel.
  Vec2 clamp(Vec2 p) const {
    if (mask_->contains(p)) return p;
    const int w = mask_->width();
    const int x = std::clamp(static_cast<int>(std::floor(p.x)), 0, w - 1);
    const int y = std::clamp(static_cast<int>(std::floor(p.y)), 0, mask_->height() - 1);
    const int src = nearest_(x, y);
    if (src < 0) return p;
    return {src % w + 0.5, src / w + 0.5};
  }

 private:
  const RegionMask* mask_;
  Raster<int> nearest_;
};

/// Sparse quadratic sum_r weight_r * (a_r . x - b_r)^2 with at most two
/// unknowns per row; x holds one 2-vector per unknown.
class LeastSquares {
 public:
  explicit LeastSquares(std::size_t unknowns) : n_(unknowns) {}

  void add(int plus, int minus, double weight, Vec2 rhs) {
    if (weight <= 0.0) return;
    rows_.push_back({plus, minus, weight, rhs});
  }

  double objective(std::span<const Vec2> x) const {
    double f = 0.0;
    for (const auto& r : rows_) f += r.weight * squared_norm(apply(r, x) - r.rhs);
    return f;
  }

  /// Normal equations solved by Jacobi-preconditioned CG from the warm start.
  std::vector<Vec2> solve(std::span<const Vec2> warm, double tolerance, int max_iterations) const {
    std::vector<Eigen::Triplet<double>> trips;
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_), 2);
    for (const auto& r : rows_) {
      const int idx[2] = {r.plus, r.minus};
      const double coef[2] = {1.0, -1.0};
      for (int a = 0; a < 2; ++a) {
        if (idx[a] < 0) continue;
        rhs(idx[a], 0) += r.weight * coef[a] * r.rhs.x;
        rhs(idx[a], 1) += r.weight * coef[a] * r.rhs.y;
        for (int b = 0; b < 2; ++b)
          if (idx[b] >= 0) trips.emplace_back(idx[a], idx[b], r.weight * coef[a] * coef[b]);
      }
    }
    Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
    A.setFromTriplets(trips.begin(), trips.end());
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(tolerance);
    cg.setMaxIterations(max_iterations);
    cg.compute(A);
    std::vector<Vec2> out(warm.begin(), warm.end());
    for (int c = 0; c < 2; ++c) {
      Eigen::VectorXd guess(static_cast<Eigen::Index>(n_));
      for (std::size_t i = 0; i < n_; ++i) guess(static_cast<Eigen::Index>(i)) = c == 0 ? warm[i].x : warm[i].y;
      const Eigen::VectorXd sol = cg.solveWithGuess(rhs.col(c), guess);
      for (std::size_t i = 0; i < n_; ++i) (c == 0 ? out[i].x : out[i].y) = sol(static_cast<Eigen::Index>(i));
    }
    return out;
  }

  bool empty() const { return rows_.empty(); }

 private:
  struct Row { int plus; int minus; double weight; Vec2 rhs; };
  static Vec2 apply(const Row& r, std::span<const Vec2> x) {
    Vec2 v;
    if (r.plus >= 0) v += x[r.plus];
    if (r.minus >= 0) v -= x[r.minus];
    return v;
  }

  std::size_t n_;
  std::vector<Row> rows_;
};

/// Best exemplar match of one output stroke.
struct Match {
  int source = 0;
  double cost = 0.0;
  NeighborhoodDescriptor out_desc;
  std::vector<int> pairing;
};

class Synthesizer {
 public:
  explicit Synthesizer(const SynthesisContext& ctx)
      : ctx_(ctx), img_(*ctx.image), integral_(img_), use_image_(ctx.params.mu > 0.0) {
    if (ctx.exemplar.strokes.empty()) throw Error(ErrorCode::invalid_exemplar, "exemplar is empty");
    if (!ctx.mask.pixels.same_shape(img_.rgb)) throw Error(ErrorCode::dimension_mismatch, "mask size differs from image");
    if (ctx.params.iterations < 1) throw Error(ErrorCode::invalid_argument, "iterations must be >= 1");
    if (ctx.params.mu < 0.0) throw Error(ErrorCode::invalid_argument, "mu must be >= 0");

    for (const auto& s : ctx.exemplar.strokes) input_.push_back(summarize(s));
    const PointGrid input_grid(centroids(input_), std::max(ctx.radius.min_value(), 2.0));
    for (std::size_t i = 0; i < input_.size(); ++i) {
      const Vec2 p = input_[i].centroid;
      const double r = ctx.radius.at(p);
      const auto cand = input_grid.within(p, 2.0 * r);
      input_desc_.push_back(build_neighborhood(static_cast<int>(i), input_, cand, ctx.orientation.frame(p), r, ctx.params.n_in));
      input_feature_.push_back(integral_.mean(p, patch_size_for_radius(r)));
      input_has_direction_.push_back(input_[i].direction != Vec2{});
    }
    collect_context();
    working_ = compute_working_mask();
    clamp_.emplace(working_);
  }

  const RegionMask& working_mask() const { return working_; }

  OutputState initialize() const {
    if (working_.empty()) throw Error(ErrorCode::empty_output, "no free area left in the region");
    std::vector<Vec2> fixed = centroids(context_);
    const auto samples = poisson_disk_sample(
        working_, [&](Vec2 p) { return ctx_.radius.at(p); }, ctx_.radius.min_value(), fixed, ctx_.params.seed,
        ctx_.params.poisson_attempts);
    if (samples.empty()) throw Error(ErrorCode::empty_output, "region too small for any stroke");
    OutputState state;
    Rng pick(ctx_.params.seed ^ 0x9E3779B97F4A7C15ULL);
    for (const Vec2& p : samples) {
      int src = 0;
      if (use_image_) {
        const Lab f = integral_.mean(p, patch_size_for_radius(ctx_.radius.at(p)));
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < input_.size(); ++i) {
          const double d = feature_distance(f, input_feature_[i]);
          if (d < best) { best = d; src = static_cast<int>(i); }
        }
      } else {
        src = static_cast<int>(pick.index(input_.size()));
      }
      state.summaries.push_back({p, transfer_direction(src, p)});
      state.sources.push_back(src);
    }
    return state;
  }

  /// Image feature distance between output location p and exemplar stroke i.
  double image_distance(Vec2 p, int i) const {
    return feature_distance(integral_.mean(p, patch_size_for_radius(ctx_.radius.at(p))), input_feature_[i]);
  }

  /// Exemplar direction re-expressed from the input frame into the frame at p.
  Vec2 transfer_direction(int src, Vec2 p) const {
    const Rotation to_local = ctx_.orientation.frame(input_[src].centroid).inverse();
    return ctx_.orientation.frame(p).apply(to_local.apply(input_[src].direction));
  }

  /// All output and context summaries, outputs first.
  std::vector<StrokeSummary> combined(const OutputState& state) const {
    std::vector<StrokeSummary> all = state.summaries;
    all.insert(all.end(), context_.begin(), context_.end());
    return all;
  }

  std::vector<Match> match(const OutputState& state) const {
    const auto all = combined(state);
    const PointGrid grid(centroids(all), std::max(ctx_.radius.min_value(), 2.0));
    std::vector<Match> out(state.size());
    for (std::size_t k = 0; k < state.size(); ++k) {
      const Vec2 p = all[k].centroid;
      const double r = ctx_.radius.at(p);
      const auto cand = grid.within(p, 2.0 * r);
      Match& m = out[k];
      m.out_desc = build_neighborhood(static_cast<int>(k), all, cand, ctx_.orientation.frame(p), r, ctx_.params.n_out);
      m.cost = std::numeric_limits<double>::infinity();
      const Lab f = integral_.mean(p, patch_size_for_radius(r));
      for (std::size_t i = 0; i < input_.size(); ++i) {
        const double d_img = feature_distance(f, input_feature_[i]);
        // lower bound: the image term alone
        if (ctx_.params.mu * d_img >= m.cost) continue;
        const auto nm = neighborhood_distance(m.out_desc, input_desc_[i], d_img, ctx_.params.mu, ctx_.params.unmatched_penalty);
        if (nm.cost < m.cost) {
          m.cost = nm.cost;
          m.source = static_cast<int>(i);
          m.pairing = nm.pairing;
        }
      }
    }
    return out;
  }

  std::vector<Vec2> targets(const OutputState& state) const {
    std::vector<Vec2> sites;
    sites.reserve(state.size() + context_.size());
    for (const auto& s : state.summaries) sites.push_back(s.centroid);
    for (const auto& s : context_) sites.push_back(s.centroid);
    return correction_centroids(sites, state.size(), ctx_.mask, ctx_.radius);
  }

  EnergyBreakdown energy(const OutputState& state, double w) const {
    EnergyBreakdown e;
    for (const auto& m : match(state)) e.neigh += m.cost;
    const auto c = targets(state);
    for (std::size_t k = 0; k < state.size(); ++k) e.corr += squared_distance(state.summaries[k].centroid, c[k]);
    e.total = (1.0 - w) * e.neigh + w * e.corr;
    return e;
  }

  /// One EM step: match, correction targets, global least squares.
  IterationRecord step(OutputState& state, double w) const {
    IterationRecord rec;
    rec.w = w;
    const auto matches = match(state);
    const auto centroid_targets = targets(state);
    for (const auto& m : matches) rec.phi_neigh += m.cost;
    for (std::size_t k = 0; k < state.size(); ++k)
      rec.phi_corr += squared_distance(state.summaries[k].centroid, centroid_targets[k]);

    const std::size_t n = state.size();
    const auto all = combined(state);
    LeastSquares pos(n), dir(n);
    const double neigh_w = 1.0 - w;
    const double anchor_w = ctx_.params.direction_anchor_weight * ctx_.params.direction_anchor_weight * (1.0 - w);
    constexpr double kStay = 1e-8;  // keeps otherwise unconstrained unknowns in place
    for (std::size_t k = 0; k < n; ++k) {
      const Match& m = matches[k];
      const int ko = static_cast<int>(k);
      const Vec2 p = state.summaries[k].centroid;
      const Rotation frame = ctx_.orientation.frame(p);
      const double r = ctx_.radius.at(p);
      const auto& in_entries = input_desc_[m.source].entries;
      for (std::size_t e = 0; e < m.out_desc.entries.size(); ++e) {
        if (m.pairing[e] < 0) continue;
        const int j = m.out_desc.entries[e].neighbor;
        const NeighborEntry& target = in_entries[m.pairing[e]];
        const Vec2 dp = frame.apply(target.position) * r;
        const Vec2 dv = frame.apply(target.direction);
        if (j < static_cast<int>(n)) {
          pos.add(j, ko, neigh_w, dp);
          dir.add(j, ko, neigh_w, dv);
        } else {
          // fixed neighbor: -x_k = target - fixed
          pos.add(-1, ko, neigh_w, dp - all[j].centroid);
          dir.add(-1, ko, neigh_w, dv - all[j].direction);
        }
      }
      dir.add(ko, -1, anchor_w, transfer_direction(m.source, p));
      pos.add(ko, -1, w, centroid_targets[k]);
      pos.add(ko, -1, kStay, p);
      dir.add(ko, -1, kStay, state.summaries[k].direction);
    }

    std::vector<Vec2> x(n), v(n);
    for (std::size_t k = 0; k < n; ++k) {
      x[k] = state.summaries[k].centroid;
      v[k] = state.summaries[k].direction;
    }
    rec.objective_before = pos.objective(x);
    const auto x_new = pos.solve(x, ctx_.params.cg_tolerance, ctx_.params.cg_max_iterations);
    rec.objective_after = pos.objective(x_new);
    std::vector<Vec2> v_new = v;
    if (w < 1.0) {
      const double before = dir.objective(v);
      v_new = dir.solve(v, ctx_.params.cg_tolerance, ctx_.params.cg_max_iterations);
      rec.objective_before += before;
      rec.objective_after += dir.objective(v_new);
    }

    for (std::size_t k = 0; k < n; ++k) {
      state.sources[k] = matches[k].source;
      state.summaries[k].centroid = clamp_->clamp(x_new[k]);
      state.summaries[k].direction = input_has_direction_[state.sources[k]] ? normalized(v_new[k]) : Vec2{};
      if (input_has_direction_[state.sources[k]] && state.summaries[k].direction == Vec2{})
        state.summaries[k].direction = transfer_direction(state.sources[k], state.summaries[k].centroid);
    }
    return rec;
  }

  SynthesisResult run(std::stop_token stop) const {
    SynthesisResult result;
    result.working_mask = working_;
    OutputState state = initialize();
    const int m = ctx_.params.iterations;
    for (int i = 1; i <= m; ++i) {
      if (stop.stop_requested()) throw Error(ErrorCode::cancelled, "synthesis cancelled");
      const double w = ctx_.correction_term ? schedule_weight(i, m) : 0.0;
      IterationRecord rec = step(state, w);
      rec.iteration = i;
      result.iterations.push_back(rec);
    }
    if (stop.stop_requested()) throw Error(ErrorCode::cancelled, "synthesis cancelled");
    for (std::size_t k = 0; k < state.size(); ++k) {
      const StrokeSummary& s = state.summaries[k];
      if (!ctx_.mask.contains(s.centroid) || !working_.contains(s.centroid)) continue;
      Stroke out = reconstruct(ctx_.exemplar.strokes[state.sources[k]], s);
      out.id = 0;
      out.source = StrokeSource::autocompleted;
      out.suggestion.reset();
      result.strokes.push_back(std::move(out));
      result.state.summaries.push_back(s);
      result.state.sources.push_back(state.sources[k]);
    }
    if (result.strokes.empty()) throw Error(ErrorCode::empty_output, "no synthesized stroke stayed inside the region");
    return result;
  }

  const std::vector<StrokeSummary>& context() const { return context_; }
  const std::vector<StrokeSummary>& inputs() const { return input_; }
  const std::vector<NeighborhoodDescriptor>& input_descriptors() const { return input_desc_; }

 private:
  static std::vector<Vec2> centroids(std::span<const StrokeSummary> s) {
    std::vector<Vec2> out;
    out.reserve(s.size());
    for (const auto& x : s) out.push_back(x.centroid);
    return out;
  }

  void collect_context() {
    // bounding box of the mask grown by the largest neighborhood reach
    int x0 = ctx_.mask.width(), y0 = ctx_.mask.height(), x1 = -1, y1 = -1;
    for (int y = 0; y < ctx_.mask.height(); ++y)
      for (int x = 0; x < ctx_.mask.width(); ++x)
        if (ctx_.mask.at(x, y)) { x0 = std::min(x0, x); y0 = std::min(y0, y); x1 = std::max(x1, x); y1 = std::max(y1, y); }
    const double reach = 2.0 * ctx_.radius.max_value();
    auto near_mask = [&](Vec2 p) {
      return x1 >= 0 && p.x >= x0 - reach && p.x <= x1 + 1 + reach && p.y >= y0 - reach && p.y <= y1 + 1 + reach;
    };
    std::unordered_set<StrokeId> seen;
    auto take = [&](const Stroke& s) {
      if (s.id != 0 && !seen.insert(s.id).second) return;
      const StrokeSummary sum = summarize(s);
      if (!near_mask(sum.centroid)) return;
      context_.push_back(sum);
      context_strokes_.push_back(&s);
    };
    for (const auto& s : ctx_.existing_strokes) take(s);
    for (const auto& s : ctx_.exemplar.strokes) take(s);
  }

  /// Region minus the footprint of context strokes grown by their width.
  RegionMask compute_working_mask() const {
    RegionMask out = ctx_.mask;
    for (const Stroke* s : context_strokes_) {
      const double reach = 1.5 * s->width;
      double minx = std::numeric_limits<double>::infinity(), miny = minx, maxx = -minx, maxy = -minx;
      for (const auto& p : s->points) {
        minx = std::min(minx, p.x); miny = std::min(miny, p.y);
        maxx = std::max(maxx, p.x); maxy = std::max(maxy, p.y);
      }
      const int xa = std::max(0, static_cast<int>(std::floor(minx - reach)));
      const int xb = std::min(out.width() - 1, static_cast<int>(std::ceil(maxx + reach)));
      const int ya = std::max(0, static_cast<int>(std::floor(miny - reach)));
      const int yb = std::min(out.height() - 1, static_cast<int>(std::ceil(maxy + reach)));
      for (int y = ya; y <= yb; ++y) {
        for (int x = xa; x <= xb; ++x) {
          if (!out.at(x, y)) continue;
          const Vec2 c{x + 0.5, y + 0.5};
          double d2 = squared_distance(c, s->points.front().position());
          for (std::size_t j = 1; j < s->points.size(); ++j)
            d2 = std::min(d2, squared_distance_to_segment(c, s->points[j - 1].position(), s->points[j].position()));
          if (d2 <= reach * reach) out.set(x, y, false);
        }
      }
    }
    return out;
  }

  const SynthesisContext& ctx_;
  const ReferenceImage& img_;
  LabIntegral integral_;
  bool use_image_;
  std::vector<StrokeSummary> input_;
  std::vector<NeighborhoodDescriptor> input_desc_;
  std::vector<Lab> input_feature_;
  std::vector<bool> input_has_direction_;
  std::vector<StrokeSummary> context_;
  std::vector<const Stroke*> context_strokes_;
  RegionMask working_;
  std::optional<NearestPixelMap> clamp_;
};

}  // namespace detail

/// Poisson-disk seeds in the free part of the region, each copying the
/// exemplar stroke with the closest image feature.
inline OutputState initialize_output(const SynthesisContext& ctx) { return detail::Synthesizer(ctx).initialize(); }

/// phi = (1 - w) phi_neigh + w phi_corr for an output state.
inline EnergyBreakdown total_energy(const OutputState& state, const SynthesisContext& ctx, double w) {
  return detail::Synthesizer(ctx).energy(state, w);
}

/// Runs initialization and `iterations` EM steps with w = (i/m)^2, then
/// rebuilds full strokes. Throws Error(cancelled) when `stop` fires between
/// iterations, Error(empty_output) when nothing fits.
inline SynthesisResult synthesize(const SynthesisContext& ctx, std::stop_token stop = {}) {
  return detail::Synthesizer(ctx).run(stop);
}

}  // namespace autostroke
