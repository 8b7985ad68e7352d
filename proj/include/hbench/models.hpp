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

#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "hbench/geometry.hpp"
#include "hbench/image.hpp"
#include "hbench/tensor.hpp"
#include "hbench/weights.hpp"

namespace hbench {

inline constexpr int kModelPatchSize = 128;
inline constexpr int kDeltaSize = 8;

struct DhConfig {
  int in_channels = 2;  // 2: grayscale pair, 6: color pair
  std::array<int, 8> conv_widths = {64, 64, 64, 64, 128, 128, 128, 128};
  int fc_hidden = 1024;

  void validate() const;
  friend bool operator==(const DhConfig&, const DhConfig&) = default;
};

struct HhModuleConfig {
  std::array<int, 4> branch_widths = {64, 64, 64, 64};
  std::array<int, 4> merged_widths = {128, 128, 128, 128};
  int fc_hidden = 1024;

  void validate() const;
  friend bool operator==(const HhModuleConfig&, const HhModuleConfig&) = default;
};

struct TensorSpec {
  std::string name;
  std::vector<int> shape;
};

// Canonical tensor names and shapes, in name order. Stack modules use the HH
// names under the prefix "module<i>." with i counted from 1.
std::vector<TensorSpec> dh_tensor_specs(const DhConfig& cfg);
std::vector<TensorSpec> hh_tensor_specs(const HhModuleConfig& cfg, const std::string& prefix = "");

// Recovers the configuration from tensor shapes. Throws
// kWeightManifestMismatch when a tensor is missing or shapes disagree.
DhConfig infer_dh_config(const WeightStore& w);
HhModuleConfig infer_hh_config(const WeightStore& w, const std::string& prefix = "");

// Requires the store to hold exactly the listed tensors.
void validate_against(const WeightStore& w, const std::vector<TensorSpec>& specs);

// Text manifest shipped next to a weight file:
//   hwts-manifest 1
//   model <dh|hh|hh_stack>
//   <name> <d0>x<d1>x...
std::string format_manifest(const std::string& model, const WeightStore& w);
// Throws kWeightManifestMismatch unless the manifest names the given model
// and lists exactly the store's tensors and shapes.
void check_manifest(const std::string& text, const std::string& model, const WeightStore& w);
// "<weights stem>.manifest" in the weight file's directory.
std::filesystem::path manifest_path_for(const std::filesystem::path& weights);

// Patch pair as a (1, 2C, 128, 128) tensor, original channels first.
Tensor stack_pair(const Image& original, const Image& warped);

FourPointDelta dh_forward(const WeightStore& w, const DhConfig& cfg, const Image& original,
                          const Image& warped);
FourPointDelta hh_module_forward(const WeightStore& w, const HhModuleConfig& cfg,
                                 const Image& original, const Image& warped,
                                 const std::string& prefix = "");

class DhModel {
 public:
  // Validates the store against the inferred configuration.
  explicit DhModel(WeightStore weights);
  // Loads weights and checks the sibling manifest.
  static DhModel load(const std::filesystem::path& path);

  const DhConfig& config() const noexcept { return cfg_; }
  const WeightStore& weights() const noexcept { return weights_; }
  FourPointDelta forward(const Image& original, const Image& warped) const {
    return dh_forward(weights_, cfg_, original, warped);
  }

 private:
  WeightStore weights_;
  DhConfig cfg_;
};

FourPointDelta residual_target(const FourPointDelta& prev_target,
                               const FourPointDelta& prev_estimate);

struct StackResult {
  FourPointDelta delta;                    // sum of module outputs
  std::vector<FourPointDelta> per_module;  // outputs in module order
  std::vector<bool> rewarp_skipped;        // modules whose delta was not a valid quad
};

// One stack stage: (original, current warped) -> delta.
using ModuleEstimator = std::function<FourPointDelta(int index, const Image& original,
                                                     const Image& warped)>;

// Runs `modules` stages. After every stage but the last, the current warped
// patch is resampled at invert(H) p, where H is the stage's delta expressed as
// a homography about the patch corners, undoing the estimated motion.
StackResult run_stack(int modules, const ModuleEstimator& estimate, const Image& original,
                      const Image& warped, const PatchCorners& corners);

class HierarchicalStack {
 public:
  // Either one module per "module<i>." prefix or a single unprefixed module.
  explicit HierarchicalStack(WeightStore weights);
  static HierarchicalStack load(const std::filesystem::path& path);

  int size() const noexcept { return static_cast<int>(configs_.size()); }
  const HhModuleConfig& config(int i) const { return configs_.at(static_cast<std::size_t>(i)); }
  const std::string& prefix(int i) const { return prefixes_.at(static_cast<std::size_t>(i)); }
  const WeightStore& weights() const noexcept { return weights_; }
  // "hh" for a single unprefixed module, "hh_stack" otherwise.
  std::string manifest_model() const;

  FourPointDelta module_forward(int i, const Image& original, const Image& warped) const;
  StackResult infer(const Image& original, const Image& warped, const PatchCorners& corners) const;

 private:
  WeightStore weights_;
  std::vector<HhModuleConfig> configs_;
  std::vector<std::string> prefixes_;
};

FourPointDelta hh_stack_infer(const HierarchicalStack& stack, const Image& original,
                              const Image& warped, const PatchCorners& corners);

}  // namespace hbench
