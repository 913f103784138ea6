#include <gtest/gtest.h>

#include <random>

#include "autostroke/region.hpp"
#include "fixtures.hpp"

using namespace autostroke;

TEST(Region, DiscFixturesReachIou) {
  std::mt19937 gen(11);
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = fixtures::disc_fixture(gen);
    const RegionMask m = infer_region(*f.image, f.exemplar, f.exemplar.last(), {});
    EXPECT_GE(iou(m, f.truth), 0.9) << "trial " << trial;
    EXPECT_EQ(m.provenance, MaskProvenance::inferred);
  }
}

TEST(Region, RawColorMaskKeepsBothBlobs) {
  std::mt19937 gen(12);
  const auto f = fixtures::two_blob_fixture(gen);
  const RegionMask raw = color_region(*f.image, f.exemplar, {});
  EXPECT_GE(mask_and(raw, f.near_blob).area(), f.near_blob.area() * 9 / 10);
  EXPECT_GE(mask_and(raw, f.far_blob).area(), f.far_blob.area() * 9 / 10);
}

TEST(Region, KeepsBlobNearestToLastStroke) {
  std::mt19937 gen(13);
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = fixtures::two_blob_fixture(gen);
    const RegionMask m = infer_region(*f.image, f.exemplar, f.exemplar.last(), {});
    EXPECT_EQ(mask_and(m, f.far_blob).area(), 0u) << "trial " << trial;
    EXPECT_GE(iou(m, f.near_blob), 0.9) << "trial " << trial;
  }
}

TEST(Region, NearestComponentPicksByDistance) {
  RegionMask m(20, 5);
  m.set(1, 2, true);
  m.set(15, 2, true);
  m.set(16, 2, true);
  EXPECT_TRUE(nearest_component(m, {12.0, 2.5}).at(15, 2));
  EXPECT_FALSE(nearest_component(m, {12.0, 2.5}).at(1, 2));
  EXPECT_TRUE(nearest_component(m, {1.5, 2.5}).at(1, 2));
  try {
    nearest_component(RegionMask(4, 4), {1, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::no_region);
  }
}

TEST(Region, SemanticUsesMajorityLabel) {
  Raster<int> labels(40, 20, 0);
  for (int y = 0; y < 20; ++y)
    for (int x = 20; x < 40; ++x) labels(x, y) = 3;
  const auto img = fixtures::painted_image(40, 20, [](Vec2 p) { return Rgb8{static_cast<std::uint8_t>(p.x * 6), 9, 9}; }, labels);
  std::vector<Stroke> strokes;
  for (int i = 0; i < 3; ++i) strokes.push_back(fixtures::line_stroke({25.0 + 4 * i, 10}, 0.0, 2.0, i + 1));
  strokes.push_back(fixtures::line_stroke({5, 10}, 0.0, 2.0, 4));
  const RegionMask sem = semantic_region(*img, fixtures::make_exemplar(strokes, FeatureSet{2u}));
  EXPECT_EQ(sem.area(), 400u);
  EXPECT_TRUE(sem.at(30, 5));

  const auto unlabeled = fixtures::constant_image(10, 10);
  try {
    semantic_region(*unlabeled, fixtures::make_exemplar(strokes, FeatureSet{2u}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::labels_absent);
  }
}

TEST(Region, NoFeatureMeansNoRegion) {
  const auto img = fixtures::constant_image(10, 10);
  const Exemplar ex = fixtures::make_exemplar({fixtures::line_stroke({3, 3}, 0, 2), fixtures::line_stroke({6, 6}, 0, 2)},
                                              FeatureSet{});
  try {
    infer_region(*img, ex, ex.last(), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::no_region);
  }
}

TEST(Region, CancellationIsObserved) {
  std::mt19937 gen(14);
  const auto f = fixtures::disc_fixture(gen);
  std::stop_source src;
  src.request_stop();
  try {
    infer_region(*f.image, f.exemplar, f.exemplar.last(), {}, src.get_token());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::cancelled);
  }
}

TEST(Livewire, FlatImageGivesShortestPath) {
  const auto img = fixtures::constant_image(30, 30);
  const auto path = livewire_path(*img, {2.5, 3.5}, {20.5, 9.5});
  ASSERT_FALSE(path.empty());
  EXPECT_EQ(path.front(), (Vec2{2.5, 3.5}));
  EXPECT_EQ(path.back(), (Vec2{20.5, 9.5}));
  // uniform cost per step: the path length is the Chebyshev distance
  EXPECT_EQ(path.size(), 19u);
  for (std::size_t i = 1; i < path.size(); ++i) {
    EXPECT_LE(std::abs(path[i].x - path[i - 1].x), 1.0);
    EXPECT_LE(std::abs(path[i].y - path[i - 1].y), 1.0);
  }
}

TEST(Livewire, FollowsStrongEdge) {
  // a vertical edge at x = 15: the path between two points on it stays close
  const auto img = fixtures::two_tone_image(30, 30, 15, {0, 0, 0}, {255, 255, 255});
  const auto path = livewire_path(*img, {14.5, 2.5}, {14.5, 27.5});
  for (const Vec2& p : path) EXPECT_NEAR(p.x, 15.0, 1.0);
}
