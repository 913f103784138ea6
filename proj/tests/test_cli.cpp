#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "autostroke/cli.hpp"
#include "fixtures.hpp"

using namespace autostroke;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

// Hatch image plus a document holding the first `n` hatch strokes.
std::string write_fixture(const std::string& name, int n) {
  const std::string dir = fixtures::temp_dir(name);
  fixtures::write_rgb_png(dir + "/ref.png", *fixtures::hatch_image());
  std::vector<Stroke> strokes;
  for (int i = 0; i < n; ++i) {
    Stroke s = fixtures::hatch_stroke(i);
    s.id = static_cast<StrokeId>(i + 1);
    strokes.push_back(s);
  }
  save_document(fixtures::document_with(strokes, "ref.png"), dir + "/doc.json");
  return dir;
}

}  // namespace

TEST(Cli, SynthIsDeterministic) {
  const std::string dir = write_fixture("cli_synth", 12);
  std::ostringstream out, err;
  cli::SynthOptions o;
  o.input.document = dir + "/doc.json";
  o.seed = 7;
  o.out = dir + "/a.json";
  ASSERT_EQ(cli::cmd_synth(o, out, err), 0) << err.str();
  o.out = dir + "/b.json";
  ASSERT_EQ(cli::cmd_synth(o, out, err), 0) << err.str();
  EXPECT_EQ(slurp(dir + "/a.json"), slurp(dir + "/b.json"));
  EXPECT_EQ(slurp(dir + "/a.png"), slurp(dir + "/b.png"));

  const Document doc = load_document(dir + "/a.json");
  ASSERT_GT(doc.stroke_count(), 12u);
  const auto img = fixtures::hatch_image();
  for (const auto& s : doc.layers[0].strokes) {
    if (s.source != StrokeSource::autocompleted) continue;
    const Vec2 c = summarize(s).centroid;
    EXPECT_TRUE(c.x >= 24 && c.x < 104 && c.y >= 24 && c.y < 104) << c.x << "," << c.y;
    EXPECT_EQ(s.suggestion, 1u);
  }
  const json report = json::parse(out.str().substr(0, out.str().find('\n')));
  EXPECT_EQ(report["exemplar_k"], 12);
}

TEST(Cli, OverridesApply) {
  const std::string dir = write_fixture("cli_overrides", 12);
  Raster<Rgba8> mask(128, 128, Rgba8{0, 0, 0, 255});
  for (int y = 24; y < 64; ++y)
    for (int x = 24; x < 64; ++x) mask(x, y) = {255, 255, 255, 255};
  write_png(dir + "/mask.png", mask);
  std::ostringstream out, err;
  cli::SynthOptions o;
  o.input.document = dir + "/doc.json";
  o.out = dir + "/o.json";
  o.region_mask = dir + "/mask.png";
  o.spacing = 10.0;
  o.iterations = 5;
  ASSERT_EQ(cli::cmd_synth(o, out, err), 0) << err.str();
  for (const auto& s : load_document(o.out).layers[0].strokes) {
    if (s.source != StrokeSource::autocompleted) continue;
    const Vec2 c = summarize(s).centroid;
    EXPECT_TRUE(c.x >= 24 && c.x < 64 && c.y >= 24 && c.y < 64);
  }
  o.orientation = "sideways";
  EXPECT_EQ(cli::cmd_synth(o, out, err), 2);
}

TEST(Cli, MissingImageExitsTwo) {
  const std::string dir = write_fixture("cli_missing", 12);
  std::filesystem::remove(dir + "/ref.png");
  std::ostringstream out, err;
  cli::SynthOptions o;
  o.input.document = dir + "/doc.json";
  o.out = dir + "/x.json";
  EXPECT_EQ(cli::cmd_synth(o, out, err), 2);
  EXPECT_NE(err.str().find("ref.png"), std::string::npos);
  EXPECT_FALSE(std::filesystem::exists(o.out));
}

TEST(Cli, NoExemplarExitsOne) {
  const std::string dir = write_fixture("cli_single", 1);
  std::ostringstream out, err;
  cli::SynthOptions o;
  o.input.document = dir + "/doc.json";
  o.out = dir + "/x.json";
  EXPECT_EQ(cli::cmd_synth(o, out, err), 1);
  EXPECT_EQ(cli::cmd_infer(o.input, out, err), 1);
}

TEST(Cli, InferReportsPlantedGroup) {
  const std::string dir = write_fixture("cli_infer", 20);
  std::ostringstream out, err;
  ASSERT_EQ(cli::cmd_infer({dir + "/doc.json", {}, {}}, out, err), 0) << err.str();
  const json r = json::parse(out.str());
  EXPECT_EQ(r["exemplar"]["k"], 20);
  EXPECT_EQ(r["exemplar"]["shared_features"], json::array({"color"}));
  EXPECT_GT(r["region_area"].get<int>(), 0);
  EXPECT_EQ(r["radius_mode"], "constant");
  EXPECT_NEAR(r["mean_nn"].get<double>(), 8.0, 1e-9);
}

TEST(Cli, RenderPngAndSvg) {
  const std::string dir = write_fixture("cli_render", 3);
  std::ostringstream err;
  cli::RenderCmdOptions o;
  o.document = dir + "/doc.json";
  o.out = dir + "/r.png";
  ASSERT_EQ(cli::cmd_render(o, err), 0) << err.str();
  const Raster<Rgba8> px = read_png(o.out);
  EXPECT_EQ(px.width(), 128);
  o.out = dir + "/r.svg";
  o.size = std::pair{64, 32};
  ASSERT_EQ(cli::cmd_render(o, err), 0);
  EXPECT_NE(slurp(o.out).find("width=\"64\""), std::string::npos);
  o.out = dir + "/r.bmp";
  EXPECT_EQ(cli::cmd_render(o, err), 2);
}
