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
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hbench/geometry.hpp"
#include "hbench/image.hpp"
#include "hbench/synth.hpp"

namespace hbench {

struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  double response = 0.0;     // Harris measure
  double orientation = 0.0;  // radians, intensity-centroid angle
};

struct BinaryDescriptor {
  std::array<std::uint64_t, 4> bits{};

  int distance(const BinaryDescriptor& other) const {
    int d = 0;
    for (int i = 0; i < 4; ++i) d += std::popcount(bits[i] ^ other.bits[i]);
    return d;
  }
  bool bit(int i) const { return (bits[i / 64] >> (i % 64)) & 1U; }
  friend bool operator==(const BinaryDescriptor&, const BinaryDescriptor&) = default;
};

struct MatchPair {
  int query_idx = 0;
  int train_idx = 0;
  int distance = 0;
};

struct DetectorConfig {
  int max_keypoints = 1000;
  // Segment-test intensity threshold in normalized units (about 10 of 255 levels).
  float fast_threshold = 0.08f;
  // Keypoints closer than this to any edge are discarded.
  int margin = 16;
};

struct RansacConfig {
  double inlier_threshold = 3.0;
  int max_iters = 2000;
  double confidence = 0.995;
  std::uint64_t seed = 0;
};

struct ClassicalConfig {
  DetectorConfig detector;
  double ratio = 0.8;
  RansacConfig ransac;
};

inline constexpr int kDescriptorBits = 256;
inline constexpr int kOrientationRadius = 15;

// FAST-9 segment test at every pixel at least `border` (>= 3) from the edges.
// Returns (x, y) of pixels with 9 contiguous circle pixels all brighter than
// center + t or all darker than center - t.
std::vector<std::array<int, 2>> fast_candidates(const Image& gray, float threshold, int border);

// Harris measure det(M) - 0.04 tr(M)^2 from Sobel gradients over a 7x7 window.
double harris_response(const Image& gray, int x, int y);

// Intensity-centroid angle atan2(m01, m10) over a radius-15 disc.
double intensity_orientation(const Image& gray, int x, int y);

// FAST candidates, 3x3 non-max suppression on the Harris measure, top
// max_keypoints by response. Needs a single-channel image of at least 32x32.
std::vector<Keypoint> detect_corners(const Image& gray, const DetectorConfig& cfg = {});
inline std::vector<Keypoint> detect_corners(const Image& gray, int max_kp) {
  DetectorConfig cfg;
  cfg.max_keypoints = max_kp;
  return detect_corners(gray, cfg);
}

// Rotated point-pair comparisons on a 5x5 box-blurred copy of the image.
// Throws kMarginViolation for keypoints within 16 px of an edge.
std::vector<BinaryDescriptor> describe(const Image& gray, std::span<const Keypoint> kps);

// Nearest / second-nearest Hamming search with ratio test (d1 < ratio * d2)
// and mutual cross-check.
std::vector<MatchPair> match(std::span<const BinaryDescriptor> query,
                             std::span<const BinaryDescriptor> train, double ratio = 0.8);

struct RansacResult {
  Homography h;
  std::vector<bool> inliers;
  int inlier_count = 0;
  int iterations = 0;
};

// 4-point RANSAC over DLT with symmetric-transfer inlier scoring
// (d_fwd^2 + d_bwd^2 < threshold^2), adaptive iteration bound, then DLT on
// the consensus set followed by LM. Throws kInsufficientCorrespondences or
// kNoModelFound.
RansacResult estimate_homography_ransac(std::span<const Correspondence> corrs,
                                        const RansacConfig& cfg = {});

struct ClassicalOutcome {
  std::optional<FourPointDelta> delta;
  std::string failure;  // set when delta is empty

  bool ok() const { return delta.has_value(); }
};

// detect -> describe -> match -> RANSAC on the two patches, reported as the
// four-point delta at the pair's corners. Never throws on bad input; every
// failure comes back as an EstimationFailed outcome.
ClassicalOutcome classical_estimate(const PatchPair& pair, const ClassicalConfig& cfg = {});

}  // namespace hbench
