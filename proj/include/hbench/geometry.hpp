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
#include <span>
#include <vector>

#include "hbench/image.hpp"

namespace hbench {

struct Point2 {
  double u = 0.0;
  double v = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

// 3x3 nonsingular projective map, row-major. Always stored in canonical
// scale: m[2][2] == 1 when |m[2][2]| > 1e-9, unit Frobenius norm otherwise.
class Homography {
 public:
  // Identity.
  Homography();

  // Canonicalizes `m`; throws kNumericalFailure when |det| <= 1e-12 after
  // scaling or when any entry is non-finite.
  static Homography from_matrix(const std::array<double, 9>& m);
  static Homography identity() { return Homography(); }
  static Homography translation(double tx, double ty);

  double operator()(int row, int col) const { return m_[row * 3 + col]; }
  const std::array<double, 9>& matrix() const noexcept { return m_; }
  double determinant() const;

 private:
  std::array<double, 9> m_;
};

// Corner order is fixed: top-left, top-right, bottom-right, bottom-left.
struct PatchCorners {
  std::array<Point2, 4> c;

  // Corners of the size x size pixel block whose top-left pixel is (x0, y0);
  // corners sit on the outermost pixel centers.
  static PatchCorners square(double x0, double y0, int size);
};

// Per-corner displacement (du1, dv1, ..., du4, dv4) in pixels, defined as
// warped corner minus original corner.
struct FourPointDelta {
  std::array<double, 8> d{};

  Point2 corner(int i) const { return {d[2 * i], d[2 * i + 1]}; }
  static FourPointDelta zero() { return {}; }
};

struct Correspondence {
  Point2 src;
  Point2 dst;
};

// Returns (x1/x3, x2/x3) of h * (u, v, 1); kProjectiveDivergence when
// |x3| < 1e-12.
Point2 apply_homography(const Homography& h, Point2 p);

// Normalized DLT (Hartley conditioning, SVD of the 2n x 9 system). Exact
// interpolation for n == 4, least squares for n > 4.
Homography dlt_homography(std::span<const Correspondence> corrs);

Homography h4pt_to_hmat(const PatchCorners& corners, const FourPointDelta& delta);
FourPointDelta hmat_to_h4pt(const Homography& h, const PatchCorners& corners);

Homography invert(const Homography& h);
// Applies b first, then a.
Homography compose(const Homography& a, const Homography& b);

// True when the four points form a strictly convex quadrilateral in the
// given cyclic order (either orientation).
bool is_convex_quad(const std::array<Point2, 4>& q);

// Bilinear sample of channel c at (x, y); points outside [0, w-1] x [0, h-1]
// return `fill`.
float sample_bilinear(const Image& img, int c, double x, double y, float fill);

// Inverse-mapping warp: out(p) = img(invert(h) * p) for p on the output grid.
Image warp_image(const Image& img, const Homography& h, int out_w, int out_h, float fill);

// Same as warp_image restricted to the out_w x out_h window of the output
// canvas whose top-left pixel is (x0, y0).
Image warp_region(const Image& img, const Homography& h, int x0, int y0, int out_w, int out_h,
                  float fill);

struct LmOptions {
  int max_iters = 100;
  double tol = 1e-10;
  double initial_damping = 1e-3;
};

struct LmResult {
  Homography h;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  int iterations = 0;
  // Set when the damping grew without an acceptable step (kNumericalFailure
  // semantics); `h` then holds the best estimate seen, possibly h0.
  bool stalled = false;
};

// Levenberg-Marquardt over the eight free entries (m[2][2] pinned to 1),
// minimizing the summed squared symmetric transfer error.
LmResult refine_lm(const Homography& h0, std::span<const Correspondence> corrs,
                   const LmOptions& options = {});

// d(dst, h*src)^2 + d(src, h_inv*dst)^2.
double symmetric_transfer_error_sq(const Homography& h, const Homography& h_inv,
                                   const Correspondence& corr);

namespace detail {

// Residual vector (4 entries per correspondence: forward du, dv, backward
// du, dv) for the parameter vector p = m[0..7], m[8] = 1.
std::vector<double> transfer_residuals(const std::array<double, 8>& p,
                                       std::span<const Correspondence> corrs);

// Row-major (4n x 8) analytic Jacobian of transfer_residuals.
std::vector<double> transfer_jacobian(const std::array<double, 8>& p,
                                      std::span<const Correspondence> corrs);

}  // namespace detail

}  // namespace hbench
