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

#include <cstdint>
#include <string>
#include <string_view>

#include "hbench/geometry.hpp"
#include "hbench/image.hpp"
#include "hbench/rng.hpp"

namespace hbench {

struct GenConfig {
  int patch_size = 128;
  int rho = 32;
  std::uint64_t seed = 0;
};

// An original patch, the warped patch pulled from the perturbed quad, and the
// ground truth relating them. `corners` are absolute source-image coordinates
// and h_target maps original corners onto the perturbed ones.
struct PatchPair {
  Image original;
  Image warped;
  FourPointDelta target;
  PatchCorners corners;
  Homography h_target;
};

enum class CorruptionKind { kNone, kNoise, kIllumination, kOcclusion };

std::string_view corruption_kind_name(CorruptionKind kind);
// Accepts "none"/"ideal", "noise", "illumination", "occlusion".
CorruptionKind parse_corruption_kind(std::string_view name);

struct CorruptionSpec {
  CorruptionKind kind = CorruptionKind::kNone;
  // eta (noise), lambda (illumination) or alpha (occlusion).
  double magnitude = 0.0;
  std::uint64_t seed = 0;
  // Noise corrupts both patches by default; false restricts it to the warped one.
  bool noise_both_patches = true;

  // Throws kInvalidArgument unless eta in [0, 1], lambda > 0, alpha in [0, 1].
  void validate() const;
};

// Samples an axis-aligned patch at least rho pixels from every edge, perturbs
// each corner coordinate uniformly on [-rho, rho] and extracts the warped
// patch at the original coordinates. Degenerate perturbations are resampled
// up to 10 times before kDegenerateQuad.
PatchPair generate_pair(const Image& img, const GenConfig& cfg, Rng& rng);
inline PatchPair generate_pair(const Image& img, const GenConfig& cfg) {
  Rng rng(cfg.seed);
  return generate_pair(img, cfg, rng);
}

// X' = clip(X + eta * N(0, 1), -1, 1), one draw per sample in plane order.
Image add_noise(const Image& img, double eta, Rng& rng);
// X' = clip(lambda * X, -1, 1).
Image shift_illumination(const Image& img, double lambda);
// Fills an n x n box, n = round(side * sqrt(alpha)), with one random color.
Image occlude(const Image& img, double alpha, Rng& rng);

// Noise hits both patches (each with its own draws); illumination and
// occlusion only the warped patch. Ground truth is never touched.
PatchPair apply_corruption(const PatchPair& pair, const CorruptionSpec& spec, Rng& rng);
inline PatchPair apply_corruption(const PatchPair& pair, const CorruptionSpec& spec) {
  Rng rng(spec.seed);
  return apply_corruption(pair, spec, rng);
}

}  // namespace hbench
