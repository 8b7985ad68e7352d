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

#include "hbench/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hbench/error.hpp"

namespace hbench {
namespace {

using Mat3 = Eigen::Matrix3d;

Mat3 to_eigen(const Homography& h) {
  const auto& m = h.matrix();
  Mat3 out;
  out << m[0], m[1], m[2], m[3], m[4], m[5], m[6], m[7], m[8];
  return out;
}

std::array<double, 9> from_eigen(const Mat3& m) {
  return {m(0, 0), m(0, 1), m(0, 2), m(1, 0), m(1, 1), m(1, 2), m(2, 0), m(2, 1), m(2, 2)};
}

bool all_finite(const std::array<double, 9>& m) {
  return std::all_of(m.begin(), m.end(), [](double x) { return std::isfinite(x); });
}

double det3(const std::array<double, 9>& m) {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

// Exact inverse (no canonical rescaling), used where derivative identities
// need H * H^-1 == I.
std::array<double, 9> raw_inverse(const std::array<double, 9>& m) {
  const double det = det3(m);
  if (!(std::abs(det) > 1e-300)) {
    throw Error(ErrorCode::kNumericalFailure, "matrix is singular");
  }
  const double inv = 1.0 / det;
  return {(m[4] * m[8] - m[5] * m[7]) * inv, (m[2] * m[7] - m[1] * m[8]) * inv,
          (m[1] * m[5] - m[2] * m[4]) * inv, (m[5] * m[6] - m[3] * m[8]) * inv,
          (m[0] * m[8] - m[2] * m[6]) * inv, (m[2] * m[3] - m[0] * m[5]) * inv,
          (m[3] * m[7] - m[4] * m[6]) * inv, (m[1] * m[6] - m[0] * m[7]) * inv,
          (m[0] * m[4] - m[1] * m[3]) * inv};
}

struct Normalizer {
  Mat3 t;
  std::vector<Eigen::Vector2d> pts;
};

Normalizer normalize_points(std::span<const Correspondence> corrs, bool use_src) {
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  for (const auto& c : corrs) {
    const Point2& p = use_src ? c.src : c.dst;
    centroid += Eigen::Vector2d(p.u, p.v);
  }
  centroid /= static_cast<double>(corrs.size());
  double mean_dist = 0.0;
  for (const auto& c : corrs) {
    const Point2& p = use_src ? c.src : c.dst;
    mean_dist += (Eigen::Vector2d(p.u, p.v) - centroid).norm();
  }
  mean_dist /= static_cast<double>(corrs.size());
  if (!(mean_dist > 1e-12)) {
    throw Error(ErrorCode::kDegenerateConfiguration, "coincident points");
  }
  const double s = std::sqrt(2.0) / mean_dist;
  Normalizer out;
  out.t << s, 0, -s * centroid.x(), 0, s, -s * centroid.y(), 0, 0, 1;
  out.pts.reserve(corrs.size());
  for (const auto& c : corrs) {
    const Point2& p = use_src ? c.src : c.dst;
    out.pts.emplace_back(s * (p.u - centroid.x()), s * (p.v - centroid.y()));
  }
  return out;
}

double triangle_area2(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                      const Eigen::Vector2d& c) {
  const Eigen::Vector2d ab = b - a;
  const Eigen::Vector2d ac = c - a;
  return ab.x() * ac.y() - ab.y() * ac.x();
}

// In normalized coordinates (mean distance sqrt(2)) a doubled area below this
// is treated as collinear.
constexpr double kCollinearTol = 1e-9;

bool has_collinear_triple(const std::vector<Eigen::Vector2d>& p) {
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      for (std::size_t k = j + 1; k < p.size(); ++k)
        if (std::abs(triangle_area2(p[i], p[j], p[k])) < kCollinearTol) return true;
  return false;
}

bool all_collinear(const std::vector<Eigen::Vector2d>& p) {
  // Points are centered, so collinearity is a rank-1 scatter matrix.
  Eigen::Matrix2d scatter = Eigen::Matrix2d::Zero();
  for (const auto& q : p) scatter += q * q.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(scatter);
  return es.eigenvalues()(0) < 1e-12 * std::max(1.0, es.eigenvalues()(1));
}

}  // namespace

Homography::Homography() : m_{1, 0, 0, 0, 1, 0, 0, 0, 1} {}

Homography Homography::from_matrix(const std::array<double, 9>& m) {
  if (!all_finite(m)) {
    throw Error(ErrorCode::kNumericalFailure, "homography has non-finite entries");
  }
  std::array<double, 9> s = m;
  if (std::abs(s[8]) > 1e-9) {
    const double inv = 1.0 / s[8];
    for (auto& x : s) x *= inv;
  } else {
    double norm = 0.0;
    for (double x : s) norm += x * x;
    norm = std::sqrt(norm);
    if (!(norm > 0.0)) throw Error(ErrorCode::kNumericalFailure, "zero matrix");
    // Sign fixed so the first significant entry is positive.
    auto first = std::find_if(s.begin(), s.end(), [](double x) { return std::abs(x) > 1e-12; });
    const double sign = (first != s.end() && *first < 0) ? -1.0 : 1.0;
    for (auto& x : s) x *= sign / norm;
  }
  if (!all_finite(s) || !(std::abs(det3(s)) > 1e-12)) {
    throw Error(ErrorCode::kNumericalFailure, "homography is singular");
  }
  Homography h;
  h.m_ = s;
  return h;
}

Homography Homography::translation(double tx, double ty) {
  return from_matrix({1, 0, tx, 0, 1, ty, 0, 0, 1});
}

double Homography::determinant() const { return det3(m_); }

PatchCorners PatchCorners::square(double x0, double y0, int size) {
  const double e = static_cast<double>(size - 1);
  return {{Point2{x0, y0}, Point2{x0 + e, y0}, Point2{x0 + e, y0 + e}, Point2{x0, y0 + e}}};
}

Point2 apply_homography(const Homography& h, Point2 p) {
  const auto& m = h.matrix();
  const double x1 = m[0] * p.u + m[1] * p.v + m[2];
  const double x2 = m[3] * p.u + m[4] * p.v + m[5];
  const double x3 = m[6] * p.u + m[7] * p.v + m[8];
  if (!(std::abs(x3) >= 1e-12)) {
    throw Error(ErrorCode::kProjectiveDivergence, "point maps to infinity");
  }
  return {x1 / x3, x2 / x3};
}

Homography dlt_homography(std::span<const Correspondence> corrs) {
  if (corrs.size() < 4) {
    throw Error(ErrorCode::kInsufficientCorrespondences,
                "DLT needs at least 4 correspondences, got " + std::to_string(corrs.size()));
  }
  for (const auto& c : corrs) {
    if (!std::isfinite(c.src.u) || !std::isfinite(c.src.v) || !std::isfinite(c.dst.u) ||
        !std::isfinite(c.dst.v)) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite correspondence");
    }
  }
  const Normalizer src = normalize_points(corrs, true);
  const Normalizer dst = normalize_points(corrs, false);
  if (corrs.size() == 4 ? (has_collinear_triple(src.pts) || has_collinear_triple(dst.pts))
                        : (all_collinear(src.pts) || all_collinear(dst.pts))) {
    throw Error(ErrorCode::kDegenerateConfiguration, "collinear points");
  }

  const auto n = static_cast<Eigen::Index>(corrs.size());
  Eigen::MatrixXd a(2 * n, 9);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = src.pts[i].x(), y = src.pts[i].y();
    const double xp = dst.pts[i].x(), yp = dst.pts[i].y();
    a.row(2 * i) << -x, -y, -1, 0, 0, 0, x * xp, y * xp, xp;
    a.row(2 * i + 1) << 0, 0, 0, -x, -y, -1, x * yp, y * yp, yp;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (!sv.allFinite() || !svd.matrixV().allFinite()) {
    throw Error(ErrorCode::kNumericalFailure, "SVD did not produce a finite solution");
  }
  // A second (near-)null direction means the solution is not unique.
  if (sv(7) < 1e-10 * sv(0)) {
    throw Error(ErrorCode::kDegenerateConfiguration, "rank-deficient DLT system");
  }
  const Eigen::VectorXd hvec = svd.matrixV().col(8);
  Mat3 hn;
  hn << hvec(0), hvec(1), hvec(2), hvec(3), hvec(4), hvec(5), hvec(6), hvec(7), hvec(8);
  const Mat3 h = dst.t.inverse() * hn * src.t;
  try {
    return Homography::from_matrix(from_eigen(h));
  } catch (const Error&) {
    throw Error(ErrorCode::kDegenerateConfiguration, "DLT solution is singular");
  }
}

Homography h4pt_to_hmat(const PatchCorners& corners, const FourPointDelta& delta) {
  std::array<Correspondence, 4> corrs;
  for (int i = 0; i < 4; ++i) {
    const Point2 d = delta.corner(i);
    corrs[i] = {corners.c[i], Point2{corners.c[i].u + d.u, corners.c[i].v + d.v}};
  }
  return dlt_homography(corrs);
}

FourPointDelta hmat_to_h4pt(const Homography& h, const PatchCorners& corners) {
  FourPointDelta out;
  for (int i = 0; i < 4; ++i) {
    const Point2 p = apply_homography(h, corners.c[i]);
    out.d[2 * i] = p.u - corners.c[i].u;
    out.d[2 * i + 1] = p.v - corners.c[i].v;
  }
  return out;
}

Homography invert(const Homography& h) {
  const auto& m = h.matrix();
  const double det = det3(m);
  if (!(std::abs(det) > 1e-12)) {
    throw Error(ErrorCode::kNumericalFailure, "cannot invert a near-singular homography");
  }
  return Homography::from_matrix(raw_inverse(m));
}

Homography compose(const Homography& a, const Homography& b) {
  return Homography::from_matrix(from_eigen(to_eigen(a) * to_eigen(b)));
}

bool is_convex_quad(const std::array<Point2, 4>& q) {
  int sign = 0;
  for (int i = 0; i < 4; ++i) {
    const Point2& a = q[i];
    const Point2& b = q[(i + 1) % 4];
    const Point2& c = q[(i + 2) % 4];
    const double cross = (b.u - a.u) * (c.v - b.v) - (b.v - a.v) * (c.u - b.u);
    if (std::abs(cross) < 1e-9) return false;
    const int s = cross > 0 ? 1 : -1;
    if (sign == 0) sign = s;
    else if (s != sign) return false;
  }
  return true;
}

float sample_bilinear(const Image& img, int c, double x, double y, float fill) {
  constexpr double kSnap = 1e-9;
  const double rx = std::round(x);
  const double ry = std::round(y);
  if (std::abs(x - rx) < kSnap) x = rx;
  if (std::abs(y - ry) < kSnap) y = ry;
  const int w = img.width();
  const int h = img.height();
  if (!(x >= 0.0 && y >= 0.0 && x <= w - 1 && y <= h - 1)) return fill;
  const int x0 = static_cast<int>(x);
  const int y0 = static_cast<int>(y);
  const int x1 = std::min(x0 + 1, w - 1);
  const int y1 = std::min(y0 + 1, h - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  if (fx == 0.0 && fy == 0.0) return img.at(c, y0, x0);
  const double top = img.at(c, y0, x0) * (1.0 - fx) + img.at(c, y0, x1) * fx;
  const double bottom = img.at(c, y1, x0) * (1.0 - fx) + img.at(c, y1, x1) * fx;
  return static_cast<float>(top * (1.0 - fy) + bottom * fy);
}

Image warp_region(const Image& img, const Homography& h, int x0, int y0, int out_w, int out_h,
                  float fill) {
  const Homography inv = invert(h);
  const auto& m = inv.matrix();
  Image out(out_w, out_h, img.channels(), fill);
  for (int j = 0; j < out_h; ++j) {
    const double v = y0 + j;
    for (int i = 0; i < out_w; ++i) {
      const double u = x0 + i;
      const double w = m[6] * u + m[7] * v + m[8];
      if (!(std::abs(w) >= 1e-12)) continue;
      const double sx = (m[0] * u + m[1] * v + m[2]) / w;
      const double sy = (m[3] * u + m[4] * v + m[5]) / w;
      for (int c = 0; c < img.channels(); ++c) {
        out.at(c, j, i) = sample_bilinear(img, c, sx, sy, fill);
      }
    }
  }
  return out;
}

Image warp_image(const Image& img, const Homography& h, int out_w, int out_h, float fill) {
  return warp_region(img, h, 0, 0, out_w, out_h, fill);
}

double symmetric_transfer_error_sq(const Homography& h, const Homography& h_inv,
                                   const Correspondence& corr) {
  const Point2 fwd = apply_homography(h, corr.src);
  const Point2 bwd = apply_homography(h_inv, corr.dst);
  const double du = fwd.u - corr.dst.u, dv = fwd.v - corr.dst.v;
  const double bu = bwd.u - corr.src.u, bv = bwd.v - corr.src.v;
  return du * du + dv * dv + bu * bu + bv * bv;
}

namespace detail {
namespace {

std::array<double, 9> full_matrix(const std::array<double, 8>& p) {
  return {p[0], p[1], p[2], p[3], p[4], p[5], p[6], p[7], 1.0};
}

}  // namespace

std::vector<double> transfer_residuals(const std::array<double, 8>& p,
                                       std::span<const Correspondence> corrs) {
  const auto m = full_matrix(p);
  const auto g = raw_inverse(m);
  std::vector<double> r;
  r.reserve(4 * corrs.size());
  for (const auto& c : corrs) {
    const double a = m[0] * c.src.u + m[1] * c.src.v + m[2];
    const double b = m[3] * c.src.u + m[4] * c.src.v + m[5];
    const double w = m[6] * c.src.u + m[7] * c.src.v + m[8];
    const double qa = g[0] * c.dst.u + g[1] * c.dst.v + g[2];
    const double qb = g[3] * c.dst.u + g[4] * c.dst.v + g[5];
    const double qw = g[6] * c.dst.u + g[7] * c.dst.v + g[8];
    r.push_back(a / w - c.dst.u);
    r.push_back(b / w - c.dst.v);
    r.push_back(qa / qw - c.src.u);
    r.push_back(qb / qw - c.src.v);
  }
  return r;
}

std::vector<double> transfer_jacobian(const std::array<double, 8>& p,
                                      std::span<const Correspondence> corrs) {
  const auto m = full_matrix(p);
  const auto g = raw_inverse(m);
  std::vector<double> jac(4 * corrs.size() * 8, 0.0);
  for (std::size_t n = 0; n < corrs.size(); ++n) {
    const auto& c = corrs[n];
    double* rf_u = &jac[(4 * n + 0) * 8];
    double* rf_v = &jac[(4 * n + 1) * 8];
    double* rb_u = &jac[(4 * n + 2) * 8];
    double* rb_v = &jac[(4 * n + 3) * 8];

    // Forward: x = a/w, y = b/w with (a, b, w) = H * (su, sv, 1).
    const double su = c.src.u, sv = c.src.v;
    const double a = m[0] * su + m[1] * sv + m[2];
    const double b = m[3] * su + m[4] * sv + m[5];
    const double w = m[6] * su + m[7] * sv + m[8];
    const double x = a / w, y = b / w;
    rf_u[0] = su / w;
    rf_u[1] = sv / w;
    rf_u[2] = 1.0 / w;
    rf_u[6] = -x * su / w;
    rf_u[7] = -x * sv / w;
    rf_v[3] = su / w;
    rf_v[4] = sv / w;
    rf_v[5] = 1.0 / w;
    rf_v[6] = -y * su / w;
    rf_v[7] = -y * sv / w;

    // Backward: q = G * d with G = H^-1, so dq/dH_rc = -G[:, r] * q[c].
    const std::array<double, 3> d{c.dst.u, c.dst.v, 1.0};
    std::array<double, 3> q{};
    for (int i = 0; i < 3; ++i) q[i] = g[3 * i] * d[0] + g[3 * i + 1] * d[1] + g[3 * i + 2] * d[2];
    const double bx = q[0] / q[2], by = q[1] / q[2];
    for (int k = 0; k < 8; ++k) {
      const int row = k / 3, col = k % 3;
      const double dq0 = -g[0 * 3 + row] * q[col];
      const double dq1 = -g[1 * 3 + row] * q[col];
      const double dq2 = -g[2 * 3 + row] * q[col];
      rb_u[k] = (dq0 - bx * dq2) / q[2];
      rb_v[k] = (dq1 - by * dq2) / q[2];
    }
  }
  return jac;
}

}  // namespace detail

LmResult refine_lm(const Homography& h0, std::span<const Correspondence> corrs,
                   const LmOptions& options) {
  if (corrs.size() < 4) {
    throw Error(ErrorCode::kInsufficientCorrespondences, "LM refinement needs 4 correspondences");
  }
  const auto& m0 = h0.matrix();
  LmResult result{h0, 0.0, 0.0, 0, false};
  if (!(std::abs(m0[8] - 1.0) < 1e-12)) {
    // m[2][2] cannot be pinned for this homography.
    result.stalled = true;
    return result;
  }

  auto evaluate = [&](const std::array<double, 8>& p, double* cost) -> bool {
    try {
      const auto r = detail::transfer_residuals(p, corrs);
      double s = 0.0;
      for (double x : r) s += x * x;
      if (!std::isfinite(s)) return false;
      *cost = s;
      return true;
    } catch (const Error&) {
      return false;
    }
  };

  std::array<double, 8> params;
  std::copy_n(m0.begin(), 8, params.begin());
  double cost = 0.0;
  if (!evaluate(params, &cost)) {
    result.stalled = true;
    return result;
  }
  result.initial_cost = result.final_cost = cost;

  double lambda = options.initial_damping;
  const auto n_res = static_cast<Eigen::Index>(4 * corrs.size());
  for (int iter = 0; iter < options.max_iters; ++iter) {
    result.iterations = iter + 1;
    if (cost == 0.0) break;
    const auto r_vec = detail::transfer_residuals(params, corrs);
    const auto j_vec = detail::transfer_jacobian(params, corrs);
    const Eigen::Map<const Eigen::VectorXd> r(r_vec.data(), n_res);
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, 8, Eigen::RowMajor>> jac(
        j_vec.data(), n_res, 8);
    const Eigen::Matrix<double, 8, 8> jtj = jac.transpose() * jac;
    const Eigen::Matrix<double, 8, 1> grad = jac.transpose() * r;
    if (grad.lpNorm<Eigen::Infinity>() < 1e-300) break;

    bool accepted = false;
    bool converged = false;
    while (!accepted) {
      Eigen::Matrix<double, 8, 8> damped = jtj;
      for (int k = 0; k < 8; ++k) damped(k, k) += lambda * std::max(jtj(k, k), 1e-12);
      const Eigen::Matrix<double, 8, 1> step = damped.ldlt().solve(-grad);
      std::array<double, 8> candidate = params;
      for (int k = 0; k < 8; ++k) candidate[k] += step(k);
      double new_cost = 0.0;
      if (step.allFinite() && evaluate(candidate, &new_cost) && new_cost < cost) {
        converged = (cost - new_cost) <= options.tol * cost;
        params = candidate;
        cost = new_cost;
        lambda = std::max(lambda / 10.0, 1e-15);
        accepted = true;
      } else {
        lambda *= 10.0;
        if (lambda > 1e16) break;
      }
    }
    if (!accepted) {
      // Failing to improve after progress (or from an exact fit) is the
      // numerical floor; failing from a poor start is a stall.
      result.stalled = iter == 0 && cost > 1e-20 * static_cast<double>(corrs.size());
      break;
    }
    if (converged) break;
  }

  if (cost < result.initial_cost) {
    try {
      result.h = Homography::from_matrix(
          {params[0], params[1], params[2], params[3], params[4], params[5], params[6], params[7],
           1.0});
      result.final_cost = cost;
    } catch (const Error&) {
      result.stalled = true;
    }
  }
  return result;
}

}  // namespace hbench
