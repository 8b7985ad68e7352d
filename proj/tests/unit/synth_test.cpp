// Copyright 2026 The hbench Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hbench/synth.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"

namespace hbench {
namespace {

Image smooth_texture(int w, int h, int channels = 1) {
  Image img(w, h, channels);
  for (int c = 0; c < channels; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        img.at(c, y, x) = static_cast<float>(0.6 * std::sin(0.11 * x + 0.3 * c) *
                                                 std::cos(0.07 * y) +
                                             0.3 * std::sin(0.023 * (x + y)));
  return img;
}

float naive_bilinear(const Image& img, int c, double x, double y) {
  const int ix = static_cast<int>(std::floor(x)), iy = static_cast<int>(std::floor(y));
  const int jx = std::min(ix + 1, img.width() - 1), jy = std::min(iy + 1, img.height() - 1);
  const double fx = x - ix, fy = y - iy;
  return static_cast<float>(
      (1 - fy) * ((1 - fx) * img.at(c, iy, ix) + fx * img.at(c, iy, jx)) +
      fy * ((1 - fx) * img.at(c, jy, ix) + fx * img.at(c, jy, jx)));
}

TEST(GeneratePairTest, ZeroRhoGivesIdenticalPatches) {
  const Image img = smooth_texture(200, 180);
  const PatchPair pair = generate_pair(img, {128, 0, 7});
  EXPECT_EQ(pair.original, pair.warped);
  for (double d : pair.target.d) EXPECT_EQ(d, 0.0);
}

TEST(GeneratePairTest, DeterministicForSeed) {
  const Image img = smooth_texture(320, 240);
  const PatchPair a = generate_pair(img, {128, 32, 99});
  const PatchPair b = generate_pair(img, {128, 32, 99});
  EXPECT_EQ(a.original, b.original);
  EXPECT_EQ(a.warped, b.warped);
  EXPECT_EQ(a.target.d, b.target.d);
  EXPECT_EQ(a.h_target.matrix(), b.h_target.matrix());
  const PatchPair c = generate_pair(img, {128, 32, 100});
  EXPECT_NE(a.target.d, c.target.d);
}

TEST(GeneratePairTest, InvariantsHoldOverManySeeds) {
  const Image img = smooth_texture(320, 240);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const GenConfig cfg{128, 32, seed};
    const PatchPair p = generate_pair(img, cfg);
    for (double d : p.target.d) {
      EXPECT_LE(std::abs(d), 32.0);
    }
    const Point2 tl = p.corners.c[0];
    const Point2 br = p.corners.c[2];
    EXPECT_GE(tl.u, 32);
    EXPECT_GE(tl.v, 32);
    EXPECT_LE(br.u, 320 - 1 - 32);
    EXPECT_LE(br.v, 240 - 1 - 32);
    const FourPointDelta back = hmat_to_h4pt(p.h_target, p.corners);
    for (int k = 0; k < 8; ++k) EXPECT_NEAR(back.d[k], p.target.d[k], 1e-4);
    EXPECT_EQ(p.original.width(), 128);
    EXPECT_EQ(p.warped.height(), 128);
  }
}

TEST(GeneratePairTest, WarpedPatchMatchesIndependentRecomputation) {
  const Image img = smooth_texture(320, 240, 3);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const PatchPair p = generate_pair(img, {128, 32, seed});
    const auto& m = p.h_target.matrix();
    const int x0 = static_cast<int>(p.corners.c[0].u), y0 = static_cast<int>(p.corners.c[0].v);
    const Image original = img.crop(x0, y0, 128, 128);
    EXPECT_EQ(original, p.original);
    for (int c = 0; c < 3; ++c) {
      for (int j = 0; j < 128; ++j) {
        for (int i = 0; i < 128; ++i) {
          const Point2 q = testing::project(m, x0 + i, y0 + j);
          ASSERT_NEAR(p.warped.at(c, j, i), naive_bilinear(img, c, q.u, q.v), 1e-5);
        }
      }
    }
  }
}

TEST(GeneratePairTest, ImageTooSmall) {
  const Image img = smooth_texture(191, 300);
  EXPECT_HBENCH_ERROR(generate_pair(img, {128, 32, 0}), ErrorCode::kImageTooSmall);
  EXPECT_NO_THROW(generate_pair(smooth_texture(192, 192), {128, 32, 0}));
}

TEST(NoiseTest, ZeroEtaIsIdentity) {
  Rng rng(1);
  const Image img = smooth_texture(50, 40);
  EXPECT_EQ(add_noise(img, 0.0, rng), img);
}

TEST(NoiseTest, ClipsAtUpperBound) {
  Rng rng(2);
  const Image img(64, 64, 1, 1.0f);
  for (double eta : {0.1, 0.5, 1.0}) {
    const Image out = add_noise(img, eta, rng);
    for (float v : out.data()) EXPECT_LE(v, 1.0f);
  }
}

TEST(NoiseTest, StandardDeviationStatistic) {
  Rng rng(3);
  const Image img(1000, 1000, 1, 0.0f);
  const Image out = add_noise(img, 0.1, rng);
  double sum = 0, sum_sq = 0;
  for (float v : out.data()) {
    sum += v;
    sum_sq += static_cast<double>(v) * v;
  }
  const double n = static_cast<double>(out.data().size());
  const double mean = sum / n;
  const double sd = std::sqrt(sum_sq / n - mean * mean);
  EXPECT_GE(sd, 0.099);
  EXPECT_LE(sd, 0.101);
  EXPECT_NEAR(mean, 0.0, 1e-3);
}

TEST(IlluminationTest, Arithmetic) {
  const Image img = smooth_texture(20, 20);
  EXPECT_EQ(shift_illumination(img, 1.0), img);
  EXPECT_FLOAT_EQ(shift_illumination(Image(2, 2, 1, 0.5f), 1.2).at(0, 0, 0), 0.6f);
  EXPECT_EQ(shift_illumination(Image(2, 2, 1, 0.8f), 1.6).at(0, 1, 1), 1.0f);
  EXPECT_EQ(shift_illumination(Image(2, 2, 1, -0.8f), 1.6).at(0, 1, 1), -1.0f);
  EXPECT_HBENCH_ERROR(shift_illumination(img, 0.0), ErrorCode::kInvalidArgument);
}

TEST(OcclusionTest, EdgeMagnitudes) {
  Rng rng(4);
  const Image img = smooth_texture(128, 128, 3);
  EXPECT_EQ(occlude(img, 0.0, rng), img);
  const Image full = occlude(img, 1.0, rng);
  for (int c = 0; c < 3; ++c) {
    const float v = full.at(c, 0, 0);
    for (float x : full.plane(c)) EXPECT_EQ(x, v);
  }
  EXPECT_HBENCH_ERROR(occlude(img, 1.5, rng), ErrorCode::kInvalidArgument);
}

TEST(OcclusionTest, QuarterAreaBoxIsSixtyFourSquare) {
  Rng rng(5);
  const Image img(128, 128, 1, 2.0f / 3.0f - 1.0f);  // value no random color can hit exactly
  for (int t = 0; t < 20; ++t) {
    const Image out = occlude(img, 0.25, rng);
    int changed = 0, min_x = 128, max_x = -1, min_y = 128, max_y = -1;
    for (int y = 0; y < 128; ++y)
      for (int x = 0; x < 128; ++x)
        if (out.at(0, y, x) != img.at(0, y, x)) {
          ++changed;
          min_x = std::min(min_x, x);
          max_x = std::max(max_x, x);
          min_y = std::min(min_y, y);
          max_y = std::max(max_y, y);
        }
    EXPECT_EQ(changed, 64 * 64);
    EXPECT_EQ(max_x - min_x + 1, 64);
    EXPECT_EQ(max_y - min_y + 1, 64);
  }
}

PatchPair sample_pair(std::uint64_t seed) {
  return generate_pair(smooth_texture(320, 240), {128, 32, seed});
}

TEST(ApplyCorruptionTest, NoneIsIdentity) {
  const PatchPair p = sample_pair(1);
  const PatchPair out = apply_corruption(p, {CorruptionKind::kNone, 0.0, 3});
  EXPECT_EQ(out.original, p.original);
  EXPECT_EQ(out.warped, p.warped);
}

TEST(ApplyCorruptionTest, PerKindTargets) {
  const PatchPair p = sample_pair(2);
  const PatchPair illum = apply_corruption(p, {CorruptionKind::kIllumination, 1.4, 3});
  EXPECT_EQ(illum.original, p.original);
  EXPECT_NE(illum.warped, p.warped);
  const PatchPair occl = apply_corruption(p, {CorruptionKind::kOcclusion, 0.4, 3});
  EXPECT_EQ(occl.original, p.original);
  EXPECT_NE(occl.warped, p.warped);
  const PatchPair noise = apply_corruption(p, {CorruptionKind::kNoise, 0.3, 3});
  EXPECT_NE(noise.original, p.original);
  EXPECT_NE(noise.warped, p.warped);
  CorruptionSpec warped_only{CorruptionKind::kNoise, 0.3, 3};
  warped_only.noise_both_patches = false;
  EXPECT_EQ(apply_corruption(p, warped_only).original, p.original);
}

TEST(ApplyCorruptionTest, NoiseIsReproducible) {
  const PatchPair p = sample_pair(3);
  const CorruptionSpec spec{CorruptionKind::kNoise, 0.5, 77};
  const PatchPair a = apply_corruption(p, spec);
  const PatchPair b = apply_corruption(p, spec);
  EXPECT_EQ(a.original, b.original);
  EXPECT_EQ(a.warped, b.warped);
}

TEST(ApplyCorruptionTest, GridKeepsRangeAndGroundTruth) {
  const PatchPair p = sample_pair(4);
  const std::vector<CorruptionSpec> grid = {
      {CorruptionKind::kNoise, 0.1, 1},        {CorruptionKind::kNoise, 0.3, 2},
      {CorruptionKind::kNoise, 0.5, 3},        {CorruptionKind::kIllumination, 1.2, 4},
      {CorruptionKind::kIllumination, 1.4, 5}, {CorruptionKind::kIllumination, 1.6, 6},
      {CorruptionKind::kOcclusion, 0.2, 7},    {CorruptionKind::kOcclusion, 0.4, 8},
      {CorruptionKind::kOcclusion, 0.6, 9}};
  for (const auto& spec : grid) {
    const PatchPair out = apply_corruption(p, spec);
    for (const Image* img : {&out.original, &out.warped})
      for (float v : img->data()) {
        ASSERT_GE(v, -1.0f);
        ASSERT_LE(v, 1.0f);
      }
    EXPECT_EQ(out.target.d, p.target.d);
    EXPECT_EQ(out.h_target.matrix(), p.h_target.matrix());
  }
}

TEST(CorruptionSpecTest, Validation) {
  EXPECT_HBENCH_ERROR((CorruptionSpec{CorruptionKind::kNoise, -0.1, 0}.validate()),
                      ErrorCode::kInvalidArgument);
  EXPECT_HBENCH_ERROR((CorruptionSpec{CorruptionKind::kIllumination, 0.0, 0}.validate()),
                      ErrorCode::kInvalidArgument);
  EXPECT_HBENCH_ERROR((CorruptionSpec{CorruptionKind::kOcclusion, 1.1, 0}.validate()),
                      ErrorCode::kInvalidArgument);
  EXPECT_EQ(parse_corruption_kind("ideal"), CorruptionKind::kNone);
  EXPECT_HBENCH_ERROR(parse_corruption_kind("blur"), ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace hbench
