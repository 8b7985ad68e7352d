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

#include "hbench/tensor.hpp"

namespace hbench {

inline constexpr float kBatchNormEps = 1e-5f;

// 3x3 cross-correlation, stride 1, zero padding 1.
// x: (N, C, H, W), w: (O, C, 3, 3), b: (O). Returns (N, O, H, W).
Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& b);

Tensor relu(const Tensor& x);

// 2x2 max pooling with stride 2 over (N, C, H, W); H and W must be even.
Tensor maxpool2(const Tensor& x);

// x: (N, F), w: (O, F), b: (O). Returns x w^T + b.
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b);

// Per-channel y = gamma (x - mean) / sqrt(var + eps) + beta over (N, C, H, W).
Tensor batchnorm_inference(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                           const Tensor& mean, const Tensor& var);

// (N, C, H, W) -> (N, C*H*W).
Tensor flatten(const Tensor& x);

// Concatenates two (N, C_i, H, W) tensors along the channel axis.
Tensor concat_channels(const Tensor& a, const Tensor& b);

}  // namespace hbench
