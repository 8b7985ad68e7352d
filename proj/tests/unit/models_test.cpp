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

#include "hbench/models.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "golden.hpp"
#include "hbench/nn.hpp"
#include "hbench/synth.hpp"
#include "nn_oracles.hpp"
#include "test_util.hpp"

namespace hbench {
namespace {

const DhConfig kTinyDh{2, {3, 3, 4, 4, 5, 5, 6, 6}, 16};
const HhModuleConfig kTinyHh{{2, 3, 3, 4}, {4, 5, 5, 6}, 12};

WeightStore make_store(const std::vector<TensorSpec>& specs, Rng* rng, double scale = 0.3) {
  WeightStore w;
  for (const auto& s : specs) {
    Tensor t(s.shape);
    const bool is_var = s.name.ends_with(".bn.var");
    const bool is_gamma = s.name.ends_with(".bn.gamma");
    for (float& v : t.values()) {
      if (is_var) {
        v = rng ? static_cast<float>(rng->uniform(0.5, 1.5)) : 1.0f;
      } else if (is_gamma) {
        v = rng ? static_cast<float>(rng->uniform(0.5, 1.5)) : 0.0f;
      } else {
        v = rng ? static_cast<float>(rng->uniform(-scale, scale)) : 0.0f;
      }
    }
    w.insert(s.name, std::move(t));
  }
  return w;
}

Image random_patch(Rng& rng, int channels) {
  Image img(128, 128, channels);
  for (float& v : img.data()) v = static_cast<float>(rng.uniform(-1, 1));
  return img;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

TEST(DhSpecsTest, DefaultLayout) {
  const auto specs = dh_tensor_specs(DhConfig{});
  EXPECT_EQ(specs.size(), 8u * 6u + 4u);
  bool found = false;
  for (const auto& s : specs) {
    if (s.name == "fc1.weight") {
      EXPECT_EQ(s.shape, (std::vector<int>{1024, 128 * 16 * 16}));
      found = true;
    }
    if (s.name == "conv1.weight") EXPECT_EQ(s.shape, (std::vector<int>{64, 2, 3, 3}));
    if (s.name == "conv5.bn.var") EXPECT_EQ(s.shape, std::vector<int>{128});
  }
  EXPECT_TRUE(found);
  EXPECT_HBENCH_ERROR(dh_tensor_specs(DhConfig{4}), ErrorCode::kInvalidArgument);
}

TEST(DhForwardTest, ZeroWeightsGiveZeroDelta) {
  Rng rng(1);
  const WeightStore w = make_store(dh_tensor_specs(kTinyDh), nullptr);
  const FourPointDelta d = dh_forward(w, kTinyDh, random_patch(rng, 1), random_patch(rng, 1));
  for (double v : d.d) EXPECT_EQ(v, 0.0);
}

TEST(DhForwardTest, RandomWeightsGiveFiniteOutput) {
  Rng rng(2);
  for (int t = 0; t < 3; ++t) {
    const WeightStore w = make_store(dh_tensor_specs(kTinyDh), &rng);
    const FourPointDelta d = dh_forward(w, kTinyDh, random_patch(rng, 1), random_patch(rng, 1));
    for (double v : d.d) EXPECT_TRUE(std::isfinite(v));
  }
}

TEST(DhForwardTest, MatchesLayerByLayerComposition) {
  Rng rng(3);
  const WeightStore w = make_store(dh_tensor_specs(kTinyDh), &rng);
  const Image o = random_patch(rng, 1), p = random_patch(rng, 1);
  Tensor x({1, 2, 128, 128});
  std::copy(o.data().begin(), o.data().end(), x.data());
  std::copy(p.data().begin(), p.data().end(), x.data() + 128 * 128);
  for (int k = 1; k <= 8; ++k) {
    const std::string n = "conv" + std::to_string(k);
    if (k == 3 || k == 5 || k == 7) x = maxpool2(x);
    x = relu(batchnorm_inference(conv2d(x, w.get(n + ".weight"), w.get(n + ".bias")),
                                 w.get(n + ".bn.gamma"), w.get(n + ".bn.beta"),
                                 w.get(n + ".bn.mean"), w.get(n + ".bn.var")));
  }
  ASSERT_EQ(x.shape(), (std::vector<int>{1, 6, 16, 16}));
  const Tensor h = relu(linear(flatten(x), w.get("fc1.weight"), w.get("fc1.bias")));
  const Tensor y = linear(h, w.get("fc2.weight"), w.get("fc2.bias"));
  const FourPointDelta d = dh_forward(w, kTinyDh, o, p);
  for (int k = 0; k < 8; ++k) EXPECT_EQ(d.d[k], y[k]);
}

TEST(DhForwardTest, ColorVariantAcceptsTriplicatedGray) {
  Rng rng(4);
  DhConfig cfg = kTinyDh;
  cfg.in_channels = 6;
  const WeightStore w = make_store(dh_tensor_specs(cfg), &rng);
  const Image o = random_patch(rng, 1), p = random_patch(rng, 1);
  const FourPointDelta d = dh_forward(w, cfg, gray_to_rgb(o), gray_to_rgb(p));
  for (double v : d.d) EXPECT_TRUE(std::isfinite(v));
  EXPECT_HBENCH_ERROR(dh_forward(w, cfg, o, p), ErrorCode::kShapeMismatch);
}

TEST(DhForwardTest, WrongPatchSize) {
  const WeightStore w = make_store(dh_tensor_specs(kTinyDh), nullptr);
  EXPECT_HBENCH_ERROR(dh_forward(w, kTinyDh, Image(64, 64, 1), Image(64, 64, 1)),
                      ErrorCode::kShapeMismatch);
}

TEST(ModelConfigTest, InferenceRecoversConfig) {
  const WeightStore w = make_store(dh_tensor_specs(kTinyDh), nullptr);
  EXPECT_EQ(infer_dh_config(w), kTinyDh);
  const WeightStore h = make_store(hh_tensor_specs(kTinyHh, "module2."), nullptr);
  EXPECT_EQ(infer_hh_config(h, "module2."), kTinyHh);
}

TEST(ModelConfigTest, StoreMismatchesAreRejected) {
  WeightStore missing;
  for (const auto& s : dh_tensor_specs(kTinyDh)) {
    if (s.name != "conv4.bn.mean") missing.insert(s.name, Tensor(s.shape, 1.0f));
  }
  EXPECT_HBENCH_ERROR(DhModel{missing}, ErrorCode::kWeightManifestMismatch);

  WeightStore extra = make_store(dh_tensor_specs(kTinyDh), nullptr);
  extra.insert("conv9.weight", Tensor({1}));
  EXPECT_HBENCH_ERROR(DhModel{extra}, ErrorCode::kWeightManifestMismatch);

  WeightStore bad;
  for (const auto& s : dh_tensor_specs(kTinyDh)) {
    bad.insert(s.name, Tensor(s.name == "fc1.bias" ? std::vector<int>{3} : s.shape));
  }
  EXPECT_HBENCH_ERROR(DhModel{bad}, ErrorCode::kWeightManifestMismatch);
}

TEST(ManifestTest, FormatAndCheck) {
  const WeightStore w = make_store(dh_tensor_specs(kTinyDh), nullptr);
  const std::string text = format_manifest("dh", w);
  EXPECT_TRUE(text.starts_with("hwts-manifest 1\nmodel dh\n"));
  EXPECT_NE(text.find("conv1.weight 3x2x3x3\n"), std::string::npos);
  EXPECT_NO_THROW(check_manifest(text, "dh", w));
  EXPECT_HBENCH_ERROR(check_manifest(text, "hh", w), ErrorCode::kWeightManifestMismatch);

  std::string wrong_shape = text;
  wrong_shape.replace(wrong_shape.find("3x2x3x3"), 7, "3x1x3x3");
  EXPECT_HBENCH_ERROR(check_manifest(wrong_shape, "dh", w), ErrorCode::kWeightManifestMismatch);
  EXPECT_HBENCH_ERROR(check_manifest(text + "ghost 1\n", "dh", w),
                      ErrorCode::kWeightManifestMismatch);
  const std::string short_text = text.substr(0, text.rfind("fc2"));
  EXPECT_HBENCH_ERROR(check_manifest(short_text, "dh", w), ErrorCode::kWeightManifestMismatch);
}

TEST(ManifestTest, LoadRequiresMatchingManifest) {
  const auto path = temp_path("hbench_models_test_dh.hwts");
  const WeightStore w = make_store(dh_tensor_specs(kTinyDh), nullptr);
  save_weights(w, path);
  std::filesystem::remove(manifest_path_for(path));
  EXPECT_HBENCH_ERROR(DhModel::load(path), ErrorCode::kWeightManifestMismatch);
  std::ofstream(manifest_path_for(path)) << format_manifest("dh", w);
  EXPECT_EQ(DhModel::load(path).config(), kTinyDh);
  std::filesystem::remove(path);
  std::filesystem::remove(manifest_path_for(path));
}

TEST(HhForwardTest, ZeroWeightsGiveZeroDelta) {
  Rng rng(5);
  const WeightStore w = make_store(hh_tensor_specs(kTinyHh), nullptr);
  const FourPointDelta d =
      hh_module_forward(w, kTinyHh, random_patch(rng, 1), random_patch(rng, 1));
  for (double v : d.d) EXPECT_EQ(v, 0.0);
}

TEST(HhForwardTest, SingleSharedBranch) {
  for (const auto& s : hh_tensor_specs(kTinyHh)) {
    EXPECT_TRUE(s.name.starts_with("branch.conv") || s.name.starts_with("conv") ||
                s.name.starts_with("fc"))
        << s.name;
  }
  Rng rng(6);
  const WeightStore w = make_store(hh_tensor_specs(kTinyHh), &rng);
  const Image o = random_patch(rng, 1), p = random_patch(rng, 1);

  auto block = [&](const std::string& n, const Tensor& x) {
    return relu(batchnorm_inference(conv2d(x, w.get(n + ".weight"), w.get(n + ".bias")),
                                    w.get(n + ".bn.gamma"), w.get(n + ".bn.beta"),
                                    w.get(n + ".bn.mean"), w.get(n + ".bn.var")));
  };
  auto branch = [&](const Image& img) {
    Tensor x({1, 1, 128, 128}, img.data());
    for (int k = 1; k <= 4; ++k) {
      x = block("branch.conv" + std::to_string(k), x);
      if (k == 2) x = maxpool2(x);
    }
    return x;
  };
  Tensor x = concat_channels(branch(o), branch(p));
  for (int k = 5; k <= 8; ++k) {
    x = block("conv" + std::to_string(k), x);
    if (k == 5 || k == 7) x = maxpool2(x);
  }
  const Tensor y = linear(relu(linear(flatten(x), w.get("fc1.weight"), w.get("fc1.bias"))),
                          w.get("fc2.weight"), w.get("fc2.bias"));
  const FourPointDelta d = hh_module_forward(w, kTinyHh, o, p);
  for (int k = 0; k < 8; ++k) EXPECT_EQ(d.d[k], y[k]);
}

TEST(HhForwardTest, RejectsColorPatches) {
  const WeightStore w = make_store(hh_tensor_specs(kTinyHh), nullptr);
  EXPECT_HBENCH_ERROR(hh_module_forward(w, kTinyHh, Image(128, 128, 3), Image(128, 128, 3)),
                      ErrorCode::kShapeMismatch);
}

TEST(ResidualTargetTest, Arithmetic) {
  FourPointDelta t, e;
  for (int i = 0; i < 8; ++i) t.d[i] = 4.0 + i, e.d[i] = 1.0;
  const auto r = residual_target(t, e);
  for (int i = 0; i < 8; ++i) EXPECT_EQ(r.d[i], 3.0 + i);
  for (double v : residual_target(t, t).d) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(residual_target(t, FourPointDelta::zero()).d, t.d);
}

Image smooth_image(int w, int h) {
  Image img(w, h, 1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      img.at(0, y, x) = static_cast<float>(0.5 * std::sin(x / 17.0) * std::cos(y / 23.0) +
                                           0.3 * std::sin((x + y) / 31.0));
  return img;
}

TEST(StackTest, SingleModuleEqualsModuleForward) {
  Rng rng(7);
  WeightStore w;
  const auto local = make_store(hh_tensor_specs(kTinyHh), &rng);
  for (const auto& [name, t] : local.entries()) w.insert("module1." + name, t);
  const HierarchicalStack stack(w);
  ASSERT_EQ(stack.size(), 1);
  EXPECT_EQ(stack.manifest_model(), "hh_stack");
  const Image o = random_patch(rng, 1), p = random_patch(rng, 1);
  const auto corners = PatchCorners::square(40, 30, 128);
  EXPECT_EQ(hh_stack_infer(stack, o, p, corners).d,
            hh_module_forward(local, kTinyHh, o, p).d);
  EXPECT_EQ(HierarchicalStack(local).manifest_model(), "hh");
}

TEST(StackTest, ExactFirstModuleUndoesTheWarp) {
  const Image img = smooth_image(320, 240);
  const PatchPair pair = generate_pair(img, {128, 32, 11});
  std::vector<Image> seen;
  const auto result = run_stack(
      2,
      [&](int i, const Image&, const Image& cur) {
        seen.push_back(cur);
        return i == 0 ? pair.target : FourPointDelta::zero();
      },
      pair.original, pair.warped, pair.corners);
  ASSERT_EQ(seen.size(), 2u);
  EXPECT_EQ(seen[0], pair.warped);
  double se = 0.0;
  int n = 0;
  for (int y = 32; y < 96; ++y)
    for (int x = 32; x < 96; ++x, ++n) {
      const double d = seen[1].at(0, y, x) - pair.original.at(0, y, x);
      se += d * d;
    }
  EXPECT_LT(std::sqrt(se / n), 0.05);
  for (double v : residual_target(pair.target, result.per_module[0]).d) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(result.delta.d, pair.target.d);
}

TEST(StackTest, ZeroModulesNeverRewarp) {
  Rng rng(8);
  const Image o = random_patch(rng, 1), p = random_patch(rng, 1);
  std::vector<Image> seen;
  const auto result = run_stack(
      3,
      [&](int, const Image&, const Image& cur) {
        seen.push_back(cur);
        return FourPointDelta::zero();
      },
      o, p, PatchCorners::square(0, 0, 128));
  for (const auto& s : seen) EXPECT_EQ(s, p);
  for (double v : result.delta.d) EXPECT_EQ(v, 0.0);
}

TEST(StackTest, AccumulatesAndSkipsDegenerateRewarp) {
  Rng rng(9);
  const Image o = random_patch(rng, 1), p = random_patch(rng, 1);
  FourPointDelta fold;  // drags the top-left corner past the bottom-right one
  fold.d[0] = 200.0, fold.d[1] = 200.0;
  FourPointDelta small;
  for (double& v : small.d) v = 0.5;
  std::vector<Image> seen;
  const auto result = run_stack(
      3,
      [&](int i, const Image&, const Image& cur) {
        seen.push_back(cur);
        return i == 0 ? fold : small;
      },
      o, p, PatchCorners::square(0, 0, 128));
  EXPECT_EQ(seen[1], p);
  EXPECT_EQ(result.rewarp_skipped, (std::vector<bool>{true, false, false}));
  for (int k = 0; k < 8; ++k) EXPECT_DOUBLE_EQ(result.delta.d[k], fold.d[k] + 2 * small.d[k]);
}

TEST(StackTest, MultiModulePrefixes) {
  Rng rng(10);
  WeightStore w;
  for (int m = 1; m <= 3; ++m) {
    const WeightStore module = make_store(hh_tensor_specs(kTinyHh), &rng);
    for (const auto& [name, t] : module.entries()) {
      w.insert("module" + std::to_string(m) + "." + name, t);
    }
  }
  const HierarchicalStack stack(w);
  EXPECT_EQ(stack.size(), 3);
  const Image o = random_patch(rng, 1), p = random_patch(rng, 1);
  const auto r = stack.infer(o, p, PatchCorners::square(0, 0, 128));
  ASSERT_EQ(r.per_module.size(), 3u);
  for (int k = 0; k < 8; ++k) {
    EXPECT_NEAR(r.delta.d[k], r.per_module[0].d[k] + r.per_module[1].d[k] + r.per_module[2].d[k],
                1e-12);
  }
  EXPECT_EQ(r.per_module[0].d, stack.module_forward(0, o, p).d);

  WeightStore other;
  for (const auto& [name, t] : w.entries()) {
    if (!name.starts_with("module2.")) other.insert(name, t);
  }
  EXPECT_HBENCH_ERROR(HierarchicalStack{other}, ErrorCode::kWeightManifestMismatch);
}

TEST(GoldenParityTest, EngineMatchesReferenceForward) {
  const auto models = testing::load_golden(std::filesystem::path(HBENCH_TEST_DATA_DIR) / "golden");
  std::size_t total = 0;
  bool saw_color = false, saw_gray = false, saw_hh = false;
  for (const auto& gm : models) {
    total += gm.cases.size();
    EXPECT_LT(testing::golden_max_error(gm), 1e-4) << gm.key;
    saw_hh |= gm.model == "hh";
    if (gm.model == "dh") (gm.cases[0].original.channels() == 3 ? saw_color : saw_gray) = true;
    bool zero_case = false;
    for (const auto& c : gm.cases) {
      zero_case |= std::all_of(c.original.data().begin(), c.original.data().end(),
                               [](float v) { return v == 0.0f; });
    }
    EXPECT_TRUE(zero_case) << gm.key;
  }
  EXPECT_GE(total, 100u);
  EXPECT_TRUE(saw_gray && saw_color && saw_hh);
}

}  // namespace
}  // namespace hbench
