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

#include <algorithm>
#include <cmath>

#include "hbench/error.hpp"

namespace hbench {
namespace {

constexpr int kMaxQuadRetries = 10;

float clip_unit(double x) { return static_cast<float>(std::clamp(x, -1.0, 1.0)); }

}  // namespace

std::string_view corruption_kind_name(CorruptionKind kind) {
  switch (kind) {
    case CorruptionKind::kNone: return "none";
    case CorruptionKind::kNoise: return "noise";
    case CorruptionKind::kIllumination: return "illumination";
    case CorruptionKind::kOcclusion: return "occlusion";
  }
  return "none";
}

CorruptionKind parse_corruption_kind(std::string_view name) {
  if (name == "none" || name == "ideal") return CorruptionKind::kNone;
  if (name == "noise") return CorruptionKind::kNoise;
  if (name == "illumination" || name == "illum") return CorruptionKind::kIllumination;
  if (name == "occlusion" || name == "occlude") return CorruptionKind::kOcclusion;
  throw Error(ErrorCode::kInvalidArgument, "unknown corruption kind '" + std::string(name) + "'");
}

void CorruptionSpec::validate() const {
  const bool ok = [&] {
    switch (kind) {
      case CorruptionKind::kNone: return true;
      case CorruptionKind::kNoise: return magnitude >= 0.0 && magnitude <= 1.0;
      case CorruptionKind::kIllumination: return magnitude > 0.0 && std::isfinite(magnitude);
      case CorruptionKind::kOcclusion: return magnitude >= 0.0 && magnitude <= 1.0;
    }
    return false;
  }();
  if (!ok) {
    throw Error(ErrorCode::kInvalidArgument,
                "magnitude " + std::to_string(magnitude) + " out of range for " +
                    std::string(corruption_kind_name(kind)));
  }
}

PatchPair generate_pair(const Image& img, const GenConfig& cfg, Rng& rng) {
  if (cfg.rho < 0 || cfg.patch_size < 2) {
    throw Error(ErrorCode::kInvalidArgument, "patch_size must be >= 2 and rho >= 0");
  }
  const int need = cfg.patch_size + 2 * cfg.rho;
  if (img.width() < need || img.height() < need) {
    throw Error(ErrorCode::kImageTooSmall,
                std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                    " image cannot hold a " + std::to_string(cfg.patch_size) +
                    " px patch with rho " + std::to_string(cfg.rho));
  }
  const int x0 = static_cast<int>(rng.uniform_int(cfg.rho, img.width() - cfg.patch_size - cfg.rho));
  const int y0 = static_cast<int>(rng.uniform_int(cfg.rho, img.height() - cfg.patch_size - cfg.rho));
  const PatchCorners corners = PatchCorners::square(x0, y0, cfg.patch_size);
  const double rho = cfg.rho;

  for (int attempt = 0; attempt < kMaxQuadRetries; ++attempt) {
    FourPointDelta delta;
    for (double& d : delta.d) d = rho == 0.0 ? 0.0 : rng.uniform(-rho, rho);
    std::array<Point2, 4> quad;
    for (int i = 0; i < 4; ++i) {
      quad[i] = {corners.c[i].u + delta.d[2 * i], corners.c[i].v + delta.d[2 * i + 1]};
    }
    if (!is_convex_quad(quad)) continue;
    Homography h;
    try {
      h = h4pt_to_hmat(corners, delta);
    } catch (const Error&) {
      continue;
    }
    PatchPair pair;
    pair.original = img.crop(x0, y0, cfg.patch_size, cfg.patch_size);
    // warp by h^-1 samples img(h * p), pulling the perturbed quad into the patch.
    pair.warped = warp_region(img, invert(h), x0, y0, cfg.patch_size, cfg.patch_size, 0.0f);
    pair.target = delta;
    pair.corners = corners;
    pair.h_target = h;
    return pair;
  }
  throw Error(ErrorCode::kDegenerateQuad, "no valid perturbation after 10 attempts");
}

Image add_noise(const Image& img, double eta, Rng& rng) {
  if (!(eta >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "noise eta must be >= 0");
  Image out = img;
  if (eta == 0.0) return out;
  for (float& x : out.data()) x = clip_unit(x + eta * rng.normal());
  return out;
}

Image shift_illumination(const Image& img, double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::kInvalidArgument, "illumination lambda must be > 0");
  Image out = img;
  if (lambda == 1.0) return out;
  for (float& x : out.data()) x = clip_unit(lambda * static_cast<double>(x));
  return out;
}

Image occlude(const Image& img, double alpha, Rng& rng) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "occlusion alpha must lie in [0, 1]");
  }
  Image out = img;
  const int side = std::min(img.width(), img.height());
  const int n = static_cast<int>(std::lround(side * std::sqrt(alpha)));
  if (n == 0) return out;
  const int bx = static_cast<int>(rng.uniform_int(0, img.width() - n));
  const int by = static_cast<int>(rng.uniform_int(0, img.height() - n));
  for (int c = 0; c < img.channels(); ++c) {
    const auto color = static_cast<float>(rng.uniform(-1.0, 1.0));
    for (int y = by; y < by + n; ++y) {
      std::fill_n(&out.at(c, y, bx), n, color);
    }
  }
  return out;
}

PatchPair apply_corruption(const PatchPair& pair, const CorruptionSpec& spec, Rng& rng) {
  spec.validate();
  PatchPair out = pair;
  switch (spec.kind) {
    case CorruptionKind::kNone:
      break;
    case CorruptionKind::kNoise:
      if (spec.noise_both_patches) out.original = add_noise(pair.original, spec.magnitude, rng);
      out.warped = add_noise(pair.warped, spec.magnitude, rng);
      break;
    case CorruptionKind::kIllumination:
      out.warped = shift_illumination(pair.warped, spec.magnitude);
      break;
    case CorruptionKind::kOcclusion:
      out.warped = occlude(pair.warped, spec.magnitude, rng);
      break;
  }
  return out;
}

}  // namespace hbench
