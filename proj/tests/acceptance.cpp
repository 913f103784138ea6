// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "autostroke/cli.hpp"
#include "autostroke/constraints.hpp"
#include "autostroke/exemplar.hpp"
#include "autostroke/frechet.hpp"
#include "autostroke/hungarian.hpp"
#include "autostroke/region.hpp"
#include "autostroke/session.hpp"
#include "autostroke/synthesis.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "synthesis_fixtures.hpp"

using namespace autostroke;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) { return std::chrono::duration<double, std::milli>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<Vec2> centroids(const OutputState& s) {
  std::vector<Vec2> out;
  for (const auto& x : s.summaries) out.push_back(x.centroid);
  return out;
}

double mean_of(const std::vector<double>& v) {
  double m = 0;
  for (double d : v) m += d;
  return v.empty() ? 0.0 : m / static_cast<double>(v.size());
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

Outcome exemplar_cap() {
  const auto img = fixtures::constant_image(400, 400);
  std::vector<Stroke> history;
  for (int i = 0; i < 60; ++i)
    history.push_back(fixtures::line_stroke({20.0 + 6 * i, 200.0}, 1.0, 8.0, i + 1, 100.0 * i));
  const auto ex = infer_exemplar(history, *img, {});
  const std::vector<Stroke> one{fixtures::line_stroke({25, 25}, 0.0, 10.0, 1)};
  const bool single_none = !infer_exemplar(one, *img, {});
  const std::size_t k = ex ? ex->k() : 0;
  return {k == 50 && single_none, fmt("k=%zu single_stroke_exemplar=%s", k, single_none ? "none" : "present")};
}

Outcome grouping_threshold() {
  // stripes of drifting color; the boundary must sit where a direct
  // weighted-Lab std of the trailing group first exceeds 15/255
  const GroupingParams params;
  std::mt19937 gen(3);
  std::uniform_int_distribution<int> step(4, 14);
  int exact = 0;
  const int trials = 20;
  for (int trial = 0; trial < trials; ++trial) {
    const int n = 24;
    std::vector<Rgb8> colors(n, Rgb8{120, 140, 90});
    int red = 120;
    for (int i = n - 7; i >= 0; --i) {
      red = std::min(255, red + step(gen));
      colors[i] = {static_cast<std::uint8_t>(red), static_cast<std::uint8_t>(260 - red), 90};
    }
    const auto img =
        fixtures::painted_image(10 * n, 40, [&](Vec2 p) { return colors[static_cast<int>(p.x) / 10]; });
    std::vector<Stroke> strokes;
    for (int i = 0; i < n; ++i)
      strokes.push_back(fixtures::line_stroke({10.0 * i + 5.0, 20.0}, kPi / 2, 12.0, i + 1, 100.0 * i));

    auto passes = [&](int j) {
      const auto cnt = static_cast<double>(n - j);
      for (int c = 0; c < 3; ++c) {
        double mean = 0, sq = 0;
        for (int i = j; i < n; ++i) mean += params.lab_weights[c] * rgb_to_lab(colors[i])[c];
        mean /= cnt;
        for (int i = j; i < n; ++i) sq += std::pow(params.lab_weights[c] * rgb_to_lab(colors[i])[c] - mean, 2);
        if (std::sqrt(sq / cnt) > params.color_std_threshold) return false;
      }
      return true;
    };
    int first = 0;
    for (int j = n - 2; j >= 0; --j)
      if (!passes(j)) {
        first = j + 1;
        break;
      }
    const auto ex = infer_exemplar(strokes, *img, params);
    exact += first > 0 && ex && ex->strokes.front().id == strokes[first].id;
  }
  return {exact == trials, fmt("boundary_exact=%d/%d", exact, trials)};
}

Outcome region_inference() {
  std::mt19937 gen(11);
  int iou_ok = 0;
  double worst = 1.0;
  for (int t = 0; t < 10; ++t) {
    const auto f = fixtures::disc_fixture(gen);
    const double v = iou(infer_region(*f.image, f.exemplar, f.exemplar.last(), {}), f.truth);
    worst = std::min(worst, v);
    iou_ok += v >= 0.9;
  }
  std::mt19937 gen2(13);
  int nearest = 0;
  for (int t = 0; t < 10; ++t) {
    const auto f = fixtures::two_blob_fixture(gen2);
    const RegionMask m = infer_region(*f.image, f.exemplar, f.exemplar.last(), {});
    nearest += mask_and(m, f.far_blob).area() == 0 && iou(m, f.near_blob) >= 0.9;
  }
  return {iou_ok == 10 && nearest == 10,
          fmt("iou>=0.9 %d/10 (min %.3f) nearest_blob %d/10", iou_ok, worst, nearest)};
}

Outcome orientation() {
  int flow = 0, global = 0;
  std::mt19937 gen(21);
  for (int t = 0; t < 20; ++t) {
    const auto f = fixtures::orientation_fixture(gen, true);
    auto etf = std::make_shared<const FlowField>(compute_etf(*f.image));
    flow += infer_orientation(f.exemplar, etf).mode == OrientationMode::flow;
  }
  std::mt19937 gen2(22);
  for (int t = 0; t < 20; ++t) {
    const auto f = fixtures::orientation_fixture(gen2, false);
    auto etf = std::make_shared<const FlowField>(compute_etf(*f.image));
    global += infer_orientation(f.exemplar, etf).mode == OrientationMode::global;
  }
  return {flow == 20 && global >= 19, fmt("aligned->flow %d/20 random->global %d/20", flow, global)};
}

Outcome radius_regression() {
  std::mt19937 gen(31);
  int recovered = 0;
  double min_r2 = 1.0;
  for (int t = 0; t < 20; ++t) {
    const auto f = fixtures::planted_radius_fixture(gen, 4.0, 0.05, 0.2);
    const auto [fit, map] = fit_radius_model(f.exemplar, *f.image);
    min_r2 = std::min(min_r2, fit.r_squared);
    recovered += map.mode == RadiusMode::model && std::abs(fit.beta(0) - 0.05) <= 0.005 &&
                 std::abs(fit.beta(2) - 4.0) <= 0.4 && fit.r_squared >= 0.9;
  }
  double worst_gap = 0;
  bool constant = true;
  for (double spacing : {6.0, 8.0, 11.5}) {
    const auto img = fixtures::constant_image(200, 200);
    const Exemplar ex = fixtures::make_exemplar(fixtures::stroke_grid({20, 20}, 5, 5, spacing));
    const auto [fit, map] = fit_radius_model(ex, *img);
    constant = constant && map.mode == RadiusMode::constant;
    worst_gap = std::max(worst_gap, std::abs(map.at({100, 100}) -
                                             mean_of(fixtures::nn_distances(fixtures::centroids_of(ex.strokes)))));
  }
  return {recovered == 20 && constant && worst_gap <= 1e-6,
          fmt("planted %d/20 (min r2 %.4f) grid constant=%d gap=%.2e", recovered, min_r2, constant, worst_gap)};
}

Outcome hungarian() {
  std::mt19937 gen(1);
  std::uniform_int_distribution<int> dim(0, 9);
  std::uniform_real_distribution<double> value(0, 100);
  int equal = 0;
  for (int t = 0; t < 1000; ++t) {
    int rows = std::min(dim(gen), 4), cols = dim(gen);
    if (t % 2) std::swap(rows, cols);
    std::vector<double> cost(rows * cols);
    for (auto& c : cost) c = t % 3 ? value(gen) : std::floor(value(gen) / 10);
    const double got = solve_assignment(cost, rows, cols).cost;
    equal += std::abs(got - oracles::exhaustive_assignment(cost, rows, cols)) <= 1e-9;
  }
  return {equal == 1000, fmt("equal %d/1000", equal)};
}

double frechet_recursive(const std::vector<Vec2>& a, const std::vector<Vec2>& b, int i, int j) {
  const double d = distance(a[i], b[j]);
  if (i == 0 && j == 0) return d;
  if (i == 0) return std::max(frechet_recursive(a, b, 0, j - 1), d);
  if (j == 0) return std::max(frechet_recursive(a, b, i - 1, 0), d);
  return std::max(std::min({frechet_recursive(a, b, i - 1, j), frechet_recursive(a, b, i - 1, j - 1),
                            frechet_recursive(a, b, i, j - 1)}),
                  d);
}

Outcome frechet() {
  std::mt19937 gen(17);
  std::uniform_int_distribution<int> len(1, 6);
  std::uniform_real_distribution<double> coord(-10, 10);
  int equal = 0;
  for (int t = 0; t < 200; ++t) {
    std::vector<Vec2> a(len(gen)), b(len(gen));
    for (auto& p : a) p = {coord(gen), coord(gen)};
    for (auto& p : b) p = {coord(gen), coord(gen)};
    equal += frechet_distance(a, b) == frechet_recursive(a, b, int(a.size()) - 1, int(b.size()) - 1);
  }
  return {equal == 200, fmt("equal %d/200", equal)};
}

Outcome synthesis_density() {
  bool ok = true;
  double lo = 1e9, hi = 0, min_nn = 1e9;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto ctx = fixtures::grid_context(128, 8, seed);
    const auto result = synthesize(ctx);
    const auto nn = fixtures::nn_distances(centroids(result.state));
    const double mean = mean_of(nn);
    lo = std::min(lo, mean);
    hi = std::max(hi, mean);
    min_nn = std::min(min_nn, *std::min_element(nn.begin(), nn.end()));
    for (const auto& s : result.state.summaries) ok = ok && ctx.mask.contains(s.centroid);
  }
  ok = ok && lo >= 6.8 && hi <= 9.2 && min_nn >= 4.0;
  return {ok, fmt("mean_nn in [%.3f, %.3f] min_nn %.3f", lo, hi, min_nn)};
}

Outcome ablations() {
  int corr_wins = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto with = fixtures::grid_context(128, 8, seed);
    auto without = with;
    without.correction_term = false;
    const auto ca = centroids(synthesize(with).state), cb = centroids(synthesize(without).state);
    corr_wins += quantization_energy(ca, ca.size(), with.mask, with.radius) <
                 quantization_energy(cb, cb.size(), with.mask, with.radius);
  }
  double with_mu = 0, without_mu = 0;
  const int seeds = 5;
  for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
    const auto a = fixtures::two_tone_fixture(0.1, seed);
    with_mu += fixtures::tone_correct_rate(a, synthesize(a.ctx).state);
    const auto b = fixtures::two_tone_fixture(0.0, seed);
    without_mu += fixtures::tone_correct_rate(b, synthesize(b.ctx).state);
  }
  with_mu /= seeds;
  without_mu /= seeds;
  return {corr_wins == 3 && with_mu >= 0.9 && without_mu < 0.9,
          fmt("correction lowers energy %d/3 tone_correct mu=0.1 %.3f mu=0 %.3f", corr_wins, with_mu, without_mu)};
}

Outcome solver_sanity() {
  auto ctx = fixtures::grid_context(96, 8, 3);
  ctx.params.iterations = 15;
  const auto result = synthesize(ctx);
  int monotone = 0, weights = 0;
  for (const auto& it : result.iterations) {
    monotone += it.objective_after <= it.objective_before * (1.0 + 1e-8);
    const double want = double(it.iteration) * it.iteration / (15.0 * 15.0);
    weights += std::abs(it.w - want) <= 1e-15;
  }
  const int n = static_cast<int>(result.iterations.size());
  return {n == 15 && monotone == n && weights == n,
          fmt("iterations %d non_increasing %d schedule %d", n, monotone, weights)};
}

Outcome determinism() {
  const std::string dir = fixtures::temp_dir("acceptance_determinism");
  fixtures::write_rgb_png(dir + "/ref.png", *fixtures::hatch_image());
  std::vector<Stroke> strokes;
  for (int i = 0; i < 12; ++i) {
    Stroke s = fixtures::hatch_stroke(i);
    s.id = static_cast<StrokeId>(i + 1);
    strokes.push_back(s);
  }
  save_document(fixtures::document_with(strokes, "ref.png"), dir + "/doc.json");
  std::ostringstream out, err;
  cli::SynthOptions o;
  o.input.document = dir + "/doc.json";
  o.seed = 42;
  o.out = dir + "/a.json";
  const int ra = cli::cmd_synth(o, out, err);
  o.out = dir + "/b.json";
  const int rb = cli::cmd_synth(o, out, err);
  const std::string a = slurp(dir + "/a.json"), b = slurp(dir + "/b.json");
  const bool same = ra == 0 && rb == 0 && !a.empty() && a == b && slurp(dir + "/a.png") == slurp(dir + "/b.png");
  return {same, fmt("exit %d/%d bytes %zu identical=%d", ra, rb, a.size(), same)};
}

Outcome interactive_budget() {
  // 10x5 exemplar grid, spacing chosen for roughly 500 outputs on 512^2
  auto ctx = fixtures::grid_context(512, 18, 1, 10, 5);
  ctx.params.iterations = 15;
  const auto t0 = Clock::now();
  const auto result = synthesize(ctx);
  const double synth_ms = ms_since(t0);

  auto img = fixtures::painted_image(512, 512, [](Vec2) { return Rgb8{180, 60, 50}; });
  Session s(Document{}, img);
  for (int i = 0; i < 30; ++i) s.submit_stroke(fixtures::hatch_stroke(i));
  double worst = 0;
  for (int i = 30; i < 40; ++i) {
    const auto t1 = Clock::now();
    s.submit_stroke(fixtures::hatch_stroke(i));
    worst = std::max(worst, ms_since(t1));
  }
  s.wait_idle();
  return {ctx.exemplar.k() == 50 && synth_ms < 2000.0 && worst < 10.0,
          fmt("k=%zu outputs=%zu synth %.0f ms ingest_max %.2f ms", ctx.exemplar.k(), result.strokes.size(), synth_ms,
              worst)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"exemplar_cap", exemplar_cap},
      {"grouping_threshold", grouping_threshold},
      {"region_inference", region_inference},
      {"orientation_choice", orientation},
      {"radius_regression", radius_regression},
      {"hungarian_oracle", hungarian},
      {"frechet_oracle", frechet},
      {"synthesis_density", synthesis_density},
      {"ablations", ablations},
      {"solver_sanity", solver_sanity},
      {"determinism", determinism},
      {"interactive_budget", interactive_budget},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
