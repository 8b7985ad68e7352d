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

#include "hbench/nn.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <string>

#include "hbench/error.hpp"

namespace hbench {
namespace {

using RowMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void require_rank(const Tensor& t, int rank, const char* what) {
  if (t.rank() != rank) {
    throw Error(ErrorCode::kShapeMismatch, std::string(what) + " must have rank " +
                                               std::to_string(rank) + ", got " +
                                               t.shape_string());
  }
}

void require_vector(const Tensor& t, int n, const char* what) {
  if (t.rank() != 1 || t.dim(0) != n) {
    throw Error(ErrorCode::kShapeMismatch, std::string(what) + " must have shape (" +
                                               std::to_string(n) + "), got " + t.shape_string());
  }
}

Tensor finite(Tensor t, const char* op) {
  for (float v : t.values()) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kNumericalFailure, std::string(op) + " produced a non-finite value");
    }
  }
  return t;
}

}  // namespace

Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& b) {
  require_rank(x, 4, "conv2d input");
  require_rank(w, 4, "conv2d weight");
  const int n = x.dim(0), c = x.dim(1), h = x.dim(2), wd = x.dim(3);
  const int o = w.dim(0);
  if (w.dim(1) != c || w.dim(2) != 3 || w.dim(3) != 3) {
    throw Error(ErrorCode::kShapeMismatch, "conv2d weight " + w.shape_string() +
                                               " does not fit input " + x.shape_string());
  }
  require_vector(b, o, "conv2d bias");

  const int k = c * 9;
  const int hw = h * wd;
  Eigen::Map<const RowMatrix> wm(w.data(), o, k);
  Eigen::Map<const Eigen::VectorXf> bv(b.data(), o);
  RowMatrix cols(k, hw);
  Tensor out({n, o, h, wd});
  for (int bi = 0; bi < n; ++bi) {
    for (int ci = 0; ci < c; ++ci) {
      const float* src = x.data() + (static_cast<std::size_t>(bi) * c + ci) * hw;
      for (int ky = 0; ky < 3; ++ky) {
        for (int kx = 0; kx < 3; ++kx) {
          float* row = cols.data() + static_cast<std::size_t>(ci * 9 + ky * 3 + kx) * hw;
          for (int y = 0; y < h; ++y) {
            const int sy = y + ky - 1;
            for (int xx = 0; xx < wd; ++xx) {
              const int sx = xx + kx - 1;
              row[y * wd + xx] =
                  (sy < 0 || sy >= h || sx < 0 || sx >= wd) ? 0.0f : src[sy * wd + sx];
            }
          }
        }
      }
    }
    Eigen::Map<RowMatrix> om(out.data() + static_cast<std::size_t>(bi) * o * hw, o, hw);
    om.noalias() = wm * cols;
    om.colwise() += bv;
  }
  return finite(std::move(out), "conv2d");
}

Tensor relu(const Tensor& x) {
  Tensor out = x;
  for (float& v : out.values()) v = std::max(v, 0.0f);
  return out;
}

Tensor maxpool2(const Tensor& x) {
  require_rank(x, 4, "maxpool2 input");
  const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  if (h % 2 != 0 || w % 2 != 0) {
    throw Error(ErrorCode::kShapeMismatch, "maxpool2 needs even spatial dims, got " +
                                               x.shape_string());
  }
  Tensor out({n, c, h / 2, w / 2});
  for (int bi = 0; bi < n; ++bi) {
    for (int ci = 0; ci < c; ++ci) {
      for (int y = 0; y < h / 2; ++y) {
        for (int xx = 0; xx < w / 2; ++xx) {
          out.at(bi, ci, y, xx) =
              std::max(std::max(x.at(bi, ci, 2 * y, 2 * xx), x.at(bi, ci, 2 * y, 2 * xx + 1)),
                       std::max(x.at(bi, ci, 2 * y + 1, 2 * xx),
                                x.at(bi, ci, 2 * y + 1, 2 * xx + 1)));
        }
      }
    }
  }
  return out;
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  require_rank(x, 2, "linear input");
  require_rank(w, 2, "linear weight");
  const int n = x.dim(0), f = x.dim(1), o = w.dim(0);
  if (w.dim(1) != f) {
    throw Error(ErrorCode::kShapeMismatch, "linear weight " + w.shape_string() +
                                               " does not fit input " + x.shape_string());
  }
  require_vector(b, o, "linear bias");
  Eigen::Map<const RowMatrix> xm(x.data(), n, f);
  Eigen::Map<const RowMatrix> wm(w.data(), o, f);
  Eigen::Map<const Eigen::RowVectorXf> bv(b.data(), o);
  Tensor out({n, o});
  Eigen::Map<RowMatrix> om(out.data(), n, o);
  om.noalias() = xm * wm.transpose();
  om.rowwise() += bv;
  return finite(std::move(out), "linear");
}

Tensor batchnorm_inference(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                           const Tensor& mean, const Tensor& var) {
  require_rank(x, 4, "batchnorm input");
  const int n = x.dim(0), c = x.dim(1);
  require_vector(gamma, c, "batchnorm gamma");
  require_vector(beta, c, "batchnorm beta");
  require_vector(mean, c, "batchnorm mean");
  require_vector(var, c, "batchnorm var");
  const std::size_t hw = static_cast<std::size_t>(x.dim(2)) * x.dim(3);
  Tensor out = x;
  for (int ci = 0; ci < c; ++ci) {
    if (!(var[ci] + kBatchNormEps > 0.0f)) {
      throw Error(ErrorCode::kNumericalFailure, "batchnorm variance must exceed -eps");
    }
    const float scale = gamma[ci] / std::sqrt(var[ci] + kBatchNormEps);
    const float shift = beta[ci] - scale * mean[ci];
    for (int bi = 0; bi < n; ++bi) {
      float* p = out.data() + (static_cast<std::size_t>(bi) * c + ci) * hw;
      for (std::size_t i = 0; i < hw; ++i) p[i] = scale * p[i] + shift;
    }
  }
  return finite(std::move(out), "batchnorm");
}

Tensor flatten(const Tensor& x) {
  require_rank(x, 4, "flatten input");
  return x.reshaped({x.dim(0), x.dim(1) * x.dim(2) * x.dim(3)});
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  require_rank(a, 4, "concat input");
  require_rank(b, 4, "concat input");
  if (a.dim(0) != b.dim(0) || a.dim(2) != b.dim(2) || a.dim(3) != b.dim(3)) {
    throw Error(ErrorCode::kShapeMismatch,
                "cannot concatenate " + a.shape_string() + " and " + b.shape_string());
  }
  const int n = a.dim(0), ca = a.dim(1), cb = b.dim(1);
  const std::size_t hw = static_cast<std::size_t>(a.dim(2)) * a.dim(3);
  Tensor out({n, ca + cb, a.dim(2), a.dim(3)});
  for (int bi = 0; bi < n; ++bi) {
    float* dst = out.data() + static_cast<std::size_t>(bi) * (ca + cb) * hw;
    std::copy_n(a.data() + static_cast<std::size_t>(bi) * ca * hw, ca * hw, dst);
    std::copy_n(b.data() + static_cast<std::size_t>(bi) * cb * hw, cb * hw, dst + ca * hw);
  }
  return out;
}

}  // namespace hbench
