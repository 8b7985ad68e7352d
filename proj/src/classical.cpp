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

#include "hbench/classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hbench/error.hpp"
#include "hbench/synth.hpp"

namespace hbench {
namespace {

constexpr std::array<std::array<int, 4>, kDescriptorBits> kPattern = {{
#include "brief_pattern.inc"
}};

// Bresenham circle of radius 3, clockwise from 12 o'clock.
constexpr std::array<std::array<int, 2>, 16> kCircle = {{{0, -3}, {1, -3}, {2, -2}, {3, -1},
                                                         {3, 0}, {3, 1}, {2, 2}, {1, 3},
                                                         {0, 3}, {-1, 3}, {-2, 2}, {-3, 1},
                                                         {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3}}};

constexpr int kArc = 9;
constexpr int kHarrisHalfWindow = 3;
constexpr double kHarrisK = 0.04;

void require_gray(const Image& img) {
  if (img.channels() != 1) {
    throw Error(ErrorCode::kInvalidArgument, "classical pipeline needs a single-channel image");
  }
}

float pixel_clamped(const Image& img, int x, int y) {
  x = std::clamp(x, 0, img.width() - 1);
  y = std::clamp(y, 0, img.height() - 1);
  return img.at(0, y, x);
}

bool segment_test(const Image& img, int x, int y, float t) {
  const float center = img.at(0, y, x);
  std::array<int, 16> state{};
  for (int k = 0; k < 16; ++k) {
    const float v = img.at(0, y + kCircle[k][1], x + kCircle[k][0]);
    state[k] = v > center + t ? 1 : (v < center - t ? -1 : 0);
  }
  // Quick reject: any 9-arc covers at least two of the four compass points.
  int bright = 0, dark = 0;
  for (int k : {0, 4, 8, 12}) {
    bright += state[k] == 1;
    dark += state[k] == -1;
  }
  if (bright < 2 && dark < 2) return false;
  for (int sign : {1, -1}) {
    int run = 0;
    for (int k = 0; k < 16 + kArc - 1; ++k) {
      run = state[k % 16] == sign ? run + 1 : 0;
      if (run >= kArc) return true;
    }
  }
  return false;
}

Image box_blur5(const Image& img) {
  const int w = img.width(), h = img.height();
  Image tmp(w, h, 1), out(w, h, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      float s = 0.0f;
      for (int d = -2; d <= 2; ++d) s += pixel_clamped(img, x + d, y);
      tmp.at(0, y, x) = s;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      float s = 0.0f;
      for (int d = -2; d <= 2; ++d) s += pixel_clamped(tmp, x, y + d);
      out.at(0, y, x) = s / 25.0f;
    }
  }
  return out;
}

double doubled_area(const Point2& a, const Point2& b, const Point2& c) {
  return (b.u - a.u) * (c.v - a.v) - (b.v - a.v) * (c.u - a.u);
}

bool sample_is_degenerate(const std::array<Correspondence, 4>& s) {
  // Doubled triangle area under 1 px^2 counts as collinear.
  constexpr double kMinArea = 1.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      for (int k = j + 1; k < 4; ++k) {
        if (std::abs(doubled_area(s[i].src, s[j].src, s[k].src)) < kMinArea) return true;
        if (std::abs(doubled_area(s[i].dst, s[j].dst, s[k].dst)) < kMinArea) return true;
      }
  return false;
}

struct Scored {
  Homography h;
  std::vector<bool> inliers;
  int count = 0;
  double error = std::numeric_limits<double>::infinity();
};

Scored score_model(const Homography& h, std::span<const Correspondence> corrs, double thr_sq) {
  Scored s;
  s.h = h;
  s.inliers.assign(corrs.size(), false);
  Homography inv;
  try {
    inv = invert(h);
  } catch (const Error&) {
    return s;
  }
  s.error = 0.0;
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    double e;
    try {
      e = symmetric_transfer_error_sq(h, inv, corrs[i]);
    } catch (const Error&) {
      continue;
    }
    if (e < thr_sq) {
      s.inliers[i] = true;
      ++s.count;
      s.error += e;
    }
  }
  return s;
}

bool better(const Scored& a, const Scored& b) {
  return a.count > b.count || (a.count == b.count && a.error < b.error);
}

int adaptive_bound(int inliers, std::size_t n, double confidence, int max_iters) {
  const double w = static_cast<double>(inliers) / static_cast<double>(n);
  const double p_good = std::pow(w, 4);
  if (p_good >= 1.0) return 1;
  if (p_good <= 0.0) return max_iters;
  const double bound = std::log(1.0 - confidence) / std::log(1.0 - p_good);
  if (!std::isfinite(bound) || bound >= max_iters) return max_iters;
  return std::max(1, static_cast<int>(std::ceil(bound)));
}

}  // namespace

std::vector<std::array<int, 2>> fast_candidates(const Image& gray, float threshold, int border) {
  require_gray(gray);
  border = std::max(border, 3);
  std::vector<std::array<int, 2>> out;
  for (int y = border; y < gray.height() - border; ++y) {
    for (int x = border; x < gray.width() - border; ++x) {
      if (segment_test(gray, x, y, threshold)) out.push_back({x, y});
    }
  }
  return out;
}

double harris_response(const Image& gray, int x, int y) {
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (int dy = -kHarrisHalfWindow; dy <= kHarrisHalfWindow; ++dy) {
    for (int dx = -kHarrisHalfWindow; dx <= kHarrisHalfWindow; ++dx) {
      const int px = x + dx, py = y + dy;
      auto p = [&](int ox, int oy) { return double(pixel_clamped(gray, px + ox, py + oy)); };
      const double gx = (p(1, -1) + 2 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2 * p(-1, 0) + p(-1, 1));
      const double gy = (p(-1, 1) + 2 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2 * p(0, -1) + p(1, -1));
      sxx += gx * gx;
      syy += gy * gy;
      sxy += gx * gy;
    }
  }
  const double tr = sxx + syy;
  return sxx * syy - sxy * sxy - kHarrisK * tr * tr;
}

double intensity_orientation(const Image& gray, int x, int y) {
  double m10 = 0.0, m01 = 0.0;
  constexpr int r = kOrientationRadius;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      if (dx * dx + dy * dy > r * r) continue;
      const double v = pixel_clamped(gray, x + dx, y + dy);
      m10 += dx * v;
      m01 += dy * v;
    }
  }
  return std::atan2(m01, m10);
}

std::vector<Keypoint> detect_corners(const Image& gray, const DetectorConfig& cfg) {
  require_gray(gray);
  if (gray.width() < 32 || gray.height() < 32) {
    throw Error(ErrorCode::kInvalidArgument, "corner detection needs at least 32x32 pixels");
  }
  const int margin = std::max(cfg.margin, kOrientationRadius);
  const auto cands = fast_candidates(gray, cfg.fast_threshold, margin);
  if (cands.empty()) return {};

  const int w = gray.width();
  std::vector<double> score(gray.plane_size(), -std::numeric_limits<double>::infinity());
  std::vector<double> resp(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) {
    resp[i] = harris_response(gray, cands[i][0], cands[i][1]);
    score[static_cast<std::size_t>(cands[i][1]) * w + cands[i][0]] = resp[i];
  }

  std::vector<Keypoint> kps;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const int x = cands[i][0], y = cands[i][1];
    const double r = resp[i];
    if (!(r > 0.0)) continue;
    bool is_max = true;
    for (int dy = -1; dy <= 1 && is_max; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const double n = score[static_cast<std::size_t>(y + dy) * w + (x + dx)];
        // Ties go to the earlier pixel in raster order.
        const bool earlier = dy < 0 || (dy == 0 && dx < 0);
        if (n > r || (n == r && earlier)) {
          is_max = false;
          break;
        }
      }
    }
    if (is_max) kps.push_back({double(x), double(y), r, 0.0});
  }
  std::stable_sort(kps.begin(), kps.end(),
                   [](const Keypoint& a, const Keypoint& b) { return a.response > b.response; });
  if (static_cast<int>(kps.size()) > cfg.max_keypoints) kps.resize(std::max(cfg.max_keypoints, 0));
  for (auto& kp : kps) {
    kp.orientation = intensity_orientation(gray, static_cast<int>(kp.x), static_cast<int>(kp.y));
  }
  return kps;
}

std::vector<BinaryDescriptor> describe(const Image& gray, std::span<const Keypoint> kps) {
  require_gray(gray);
  constexpr int kMargin = 16;
  for (const auto& kp : kps) {
    const long x = std::lround(kp.x), y = std::lround(kp.y);
    if (x < kMargin || y < kMargin || x > gray.width() - 1 - kMargin ||
        y > gray.height() - 1 - kMargin) {
      throw Error(ErrorCode::kMarginViolation, "keypoint too close to the image edge");
    }
  }
  std::vector<BinaryDescriptor> out;
  out.reserve(kps.size());
  if (kps.empty()) return out;
  const Image smooth = box_blur5(gray);
  for (const auto& kp : kps) {
    const double c = std::cos(kp.orientation), s = std::sin(kp.orientation);
    const int cx = static_cast<int>(std::lround(kp.x));
    const int cy = static_cast<int>(std::lround(kp.y));
    auto sample = [&](int px, int py) {
      const auto rx = static_cast<int>(std::lround(c * px - s * py));
      const auto ry = static_cast<int>(std::lround(s * px + c * py));
      return smooth.at(0, cy + ry, cx + rx);
    };
    BinaryDescriptor d;
    for (int i = 0; i < kDescriptorBits; ++i) {
      const auto& p = kPattern[i];
      if (sample(p[0], p[1]) < sample(p[2], p[3])) d.bits[i / 64] |= (1ULL << (i % 64));
    }
    out.push_back(d);
  }
  return out;
}

std::vector<MatchPair> match(std::span<const BinaryDescriptor> query,
                             std::span<const BinaryDescriptor> train, double ratio) {
  std::vector<MatchPair> out;
  if (query.empty() || train.empty()) return out;
  // Best train for each query (with ratio test) and best query for each train.
  std::vector<int> best_query_for_train(train.size(), -1);
  std::vector<int> best_query_dist(train.size(), std::numeric_limits<int>::max());
  std::vector<int> q_best(query.size(), -1), q_d1(query.size()), q_d2(query.size());
  for (std::size_t q = 0; q < query.size(); ++q) {
    int d1 = std::numeric_limits<int>::max(), d2 = d1, idx = -1;
    for (std::size_t t = 0; t < train.size(); ++t) {
      const int d = query[q].distance(train[t]);
      if (d < d1) {
        d2 = d1;
        d1 = d;
        idx = static_cast<int>(t);
      } else if (d < d2) {
        d2 = d;
      }
      if (d < best_query_dist[t]) {
        best_query_dist[t] = d;
        best_query_for_train[t] = static_cast<int>(q);
      }
    }
    q_best[q] = idx;
    q_d1[q] = d1;
    q_d2[q] = d2;
  }
  for (std::size_t q = 0; q < query.size(); ++q) {
    const int t = q_best[q];
    if (t < 0) continue;
    const bool unique_second = q_d2[q] == std::numeric_limits<int>::max();
    if (!unique_second && !(q_d1[q] < ratio * q_d2[q])) continue;
    if (best_query_for_train[t] != static_cast<int>(q)) continue;
    out.push_back({static_cast<int>(q), t, q_d1[q]});
  }
  return out;
}

RansacResult estimate_homography_ransac(std::span<const Correspondence> corrs,
                                        const RansacConfig& cfg) {
  if (corrs.size() < 4) {
    throw Error(ErrorCode::kInsufficientCorrespondences,
                "RANSAC needs 4 correspondences, got " + std::to_string(corrs.size()));
  }
  if (!(cfg.inlier_threshold > 0.0) || !(cfg.confidence > 0.0 && cfg.confidence < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid RANSAC configuration");
  }
  const double thr_sq = cfg.inlier_threshold * cfg.inlier_threshold;
  const auto n = static_cast<std::int64_t>(corrs.size());
  Rng rng(cfg.seed);
  Scored best;
  int bound = cfg.max_iters;
  int iter = 0;
  for (; iter < bound; ++iter) {
    std::array<std::int64_t, 4> idx{};
    for (int k = 0; k < 4; ++k) {
      bool fresh;
      do {
        idx[k] = rng.uniform_int(0, n - 1);
        fresh = std::find(idx.begin(), idx.begin() + k, idx[k]) == idx.begin() + k;
      } while (!fresh);
    }
    std::array<Correspondence, 4> sample;
    for (int k = 0; k < 4; ++k) sample[k] = corrs[idx[k]];
    if (sample_is_degenerate(sample)) continue;
    Homography h;
    try {
      h = dlt_homography(sample);
    } catch (const Error&) {
      continue;
    }
    Scored s = score_model(h, corrs, thr_sq);
    if (better(s, best)) {
      best = std::move(s);
      bound = adaptive_bound(best.count, corrs.size(), cfg.confidence, cfg.max_iters);
    }
  }
  if (best.count < 4) {
    throw Error(ErrorCode::kNoModelFound, "no sample produced a 4-inlier consensus");
  }

  // Re-fit on the consensus set while it keeps growing (or holds with lower error).
  for (int round = 0; round < 5; ++round) {
    std::vector<Correspondence> inl;
    for (std::size_t i = 0; i < corrs.size(); ++i)
      if (best.inliers[i]) inl.push_back(corrs[i]);
    Homography refit;
    try {
      refit = refine_lm(dlt_homography(inl), inl).h;
    } catch (const Error&) {
      break;
    }
    Scored s = score_model(refit, corrs, thr_sq);
    if (s.count < best.count || (s.count == best.count && !(s.error < best.error))) break;
    const bool grew = s.count > best.count;
    best = std::move(s);
    if (!grew) break;
  }
  return {best.h, best.inliers, best.count, iter};
}

ClassicalOutcome classical_estimate(const PatchPair& pair, const ClassicalConfig& cfg) {
  ClassicalOutcome out;
  try {
    const Image original = to_grayscale(pair.original);
    const Image warped = to_grayscale(pair.warped);
    const auto kp_w = detect_corners(warped, cfg.detector);
    const auto kp_o = detect_corners(original, cfg.detector);
    if (kp_w.size() < 4 || kp_o.size() < 4) {
      out.failure = "too few keypoints";
      return out;
    }
    const auto d_w = describe(warped, kp_w);
    const auto d_o = describe(original, kp_o);
    const auto matches = match(d_w, d_o, cfg.ratio);
    std::vector<Correspondence> corrs;
    corrs.reserve(matches.size());
    for (const auto& m : matches) {
      corrs.push_back({{kp_w[m.query_idx].x, kp_w[m.query_idx].y},
                       {kp_o[m.train_idx].x, kp_o[m.train_idx].y}});
    }
    // Model maps warped-patch pixels onto original-patch pixels, which in
    // patch-local coordinates is the ground-truth homography itself.
    const RansacResult r = estimate_homography_ransac(corrs, cfg.ransac);
    const PatchCorners local = PatchCorners::square(0, 0, original.width());
    FourPointDelta delta = hmat_to_h4pt(r.h, local);
    for (double d : delta.d) {
      if (!std::isfinite(d)) {
        out.failure = "non-finite estimate";
        return out;
      }
    }
    out.delta = delta;
  } catch (const Error& e) {
    out.failure = e.what();
  }
  return out;
}

}  // namespace hbench
