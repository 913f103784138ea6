#include <gtest/gtest.h>

#include <random>

#include "autostroke/flow_field.hpp"
#include "autostroke/image.hpp"
#include "fixtures.hpp"

using namespace autostroke;

TEST(Lab, KnownColors) {
  const Lab white = rgb_to_lab({255, 255, 255});
  EXPECT_NEAR(white[0], 1.0, 1e-4);
  EXPECT_NEAR(white[1], 128.0 / 255.0, 1e-4);
  EXPECT_NEAR(white[2], 128.0 / 255.0, 1e-4);
  const Lab black = rgb_to_lab({0, 0, 0});
  EXPECT_NEAR(black[0], 0.0, 1e-9);
  // sRGB red is L*=53.24, a*=80.09, b*=67.20 under D65
  const Lab red = rgb_to_lab({255, 0, 0});
  EXPECT_NEAR(red[0] * 100.0, 53.24, 0.02);
  EXPECT_NEAR(red[1] * 255.0 - 128.0, 80.09, 0.05);
  EXPECT_NEAR(red[2] * 255.0 - 128.0, 67.20, 0.05);
}

TEST(Sobel, ConstantIsZeroAndStepIsScaled) {
  const auto flat = fixtures::constant_image(8, 8);
  for (double g : flat->gradient.data()) EXPECT_EQ(g, 0.0);

  Raster<double> step(6, 6, 0.0);
  for (int y = 0; y < 6; ++y)
    for (int x = 3; x < 6; ++x) step(x, y) = 1.0;
  const Raster<double> g = sobel_magnitude(step);
  // vertical unit step: |gx| = 4 next to the edge, scaled by 1/(4 sqrt 2)
  EXPECT_NEAR(g(2, 3), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(g(3, 3), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_EQ(g(0, 3), 0.0);

  // a checkerboard corner saturates at 1
  Raster<double> corner(3, 3, 0.0);
  corner(2, 0) = corner(2, 1) = corner(1, 2) = corner(2, 2) = corner(0, 2) = 1.0;
  EXPECT_LE(sobel_magnitude(corner)(1, 1), 1.0);
}

TEST(PatchFeature, IntegralMatchesDirectMean) {
  std::mt19937 gen(5);
  std::uniform_int_distribution<int> c(0, 255);
  const auto img = fixtures::painted_image(23, 17, [&](Vec2) {
    return Rgb8{static_cast<std::uint8_t>(c(gen)), static_cast<std::uint8_t>(c(gen)), static_cast<std::uint8_t>(c(gen))};
  });
  const LabIntegral integral(*img);
  for (int patch : {1, 5, 9, 21})
    for (Vec2 p : {Vec2{0.5, 0.5}, Vec2{11.2, 8.7}, Vec2{22.9, 16.9}, Vec2{3.0, 15.0}}) {
      const Lab a = patch_feature(*img, p, patch);
      const Lab b = integral.mean(p, patch);
      for (int k = 0; k < 3; ++k) EXPECT_NEAR(a[k], b[k], 1e-9);
    }
}

TEST(PatchFeature, RejectsEvenPatch) {
  const auto img = fixtures::constant_image(4, 4);
  EXPECT_THROW(patch_feature(*img, {1, 1}, 4), Error);
  EXPECT_THROW(patch_feature(*img, {1, 1}, 0), Error);
}

TEST(PatchFeature, SizeFromRadius) {
  EXPECT_EQ(patch_size_for_radius(2.0), 5);
  EXPECT_EQ(patch_size_for_radius(8.0), 9);
  EXPECT_EQ(patch_size_for_radius(11.0), 11);
  EXPECT_EQ(patch_size_for_radius(64.0), 21);
}

TEST(ReferenceImage, LoadsPngAndLabels) {
  const std::string dir = fixtures::temp_dir("image_io");
  const auto img = fixtures::two_tone_image(12, 8, 6, {255, 0, 0}, {0, 0, 255});
  fixtures::write_rgb_png(dir + "/ref.png", *img);
  Raster<Rgba8> labels(12, 8, Rgba8{3, 0, 0, 255});
  labels(0, 0) = {7, 0, 0, 255};
  write_png(dir + "/labels.png", labels);
  write_png(dir + "/small.png", Raster<Rgba8>(5, 5, Rgba8{0, 0, 0, 255}));

  const ReferenceImage loaded = load_reference(dir + "/ref.png", dir + "/labels.png");
  EXPECT_EQ(loaded.rgb, img->rgb);
  ASSERT_TRUE(loaded.has_labels());
  EXPECT_EQ(*loaded.label_at({0.5, 0.5}), 7);
  EXPECT_EQ(*loaded.label_at({5.5, 5.5}), 3);

  try {
    load_reference(dir + "/ref.png", dir + "/small.png");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::dimension_mismatch);
  }
  try {
    load_reference(dir + "/nope.png");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::io);
  }
}

TEST(Etf, ConstantImageIsGlobal) {
  const auto img = fixtures::constant_image(16, 16);
  EXPECT_TRUE(compute_etf(*img).global);
}

TEST(Etf, TangentsFollowEdges) {
  // vertical edge: tangent is vertical near it
  const auto img = fixtures::two_tone_image(32, 32, 16, {0, 0, 0}, {255, 255, 255});
  const FlowField f = compute_etf(*img);
  ASSERT_FALSE(f.global);
  const Vec2 t = f.at({16.0, 16.5});
  EXPECT_NEAR(std::abs(t.y), 1.0, 1e-6);
  // tangents stay unit length everywhere
  for (const Vec2& v : f.tangents.data()) EXPECT_NEAR(norm(v), 1.0, 1e-6);
}

TEST(Etf, CircleTangentsAreAzimuthal) {
  const Vec2 c{32, 32};
  const auto img = fixtures::painted_image(64, 64, [&](Vec2 p) {
    return distance(p, c) < 20 ? Rgb8{20, 20, 20} : Rgb8{230, 230, 230};
  });
  const FlowField f = compute_etf(*img);
  for (double a = 0; a < 2 * kPi; a += 0.4) {
    const Vec2 p = c + Vec2{std::cos(a), std::sin(a)} * 20.0;
    const Vec2 radial{std::cos(a), std::sin(a)};
    EXPECT_LT(std::abs(dot(f.at(p), radial)), 0.3) << "angle " << a;
  }
}
