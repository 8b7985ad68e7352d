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

#include "hbench/image.hpp"

#include <algorithm>
#include <string>

#include "hbench/error.hpp"

namespace hbench {

Image::Image(int width, int height, int channels, float fill)
    : width_(width), height_(height), channels_(channels) {
  if (width < 1 || height < 1 || channels < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "image dimensions must be positive, got " + std::to_string(width) + "x" +
                    std::to_string(height) + "x" + std::to_string(channels));
  }
  data_.assign(static_cast<std::size_t>(channels) * plane_size(), fill);
}

Image Image::crop(int x0, int y0, int w, int h) const {
  if (x0 < 0 || y0 < 0 || w < 1 || h < 1 || x0 + w > width_ || y0 + h > height_) {
    throw Error(ErrorCode::kInvalidArgument, "crop window outside image");
  }
  Image out(w, h, channels_);
  for (int c = 0; c < channels_; ++c) {
    for (int y = 0; y < h; ++y) {
      const float* src = &at(c, y0 + y, x0);
      std::copy(src, src + w, &out.at(c, y, 0));
    }
  }
  return out;
}

Image to_grayscale(const Image& img) {
  if (img.channels() == 1) return img;
  if (img.channels() != 3) {
    throw Error(ErrorCode::kUnsupportedFormat, "grayscale conversion needs 1 or 3 channels");
  }
  Image out(img.width(), img.height(), 1);
  auto r = img.plane(0);
  auto g = img.plane(1);
  auto b = img.plane(2);
  auto dst = out.plane(0);
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = 0.299f * r[i] + 0.587f * g[i] + 0.114f * b[i];
  }
  return out;
}

Image gray_to_rgb(const Image& img) {
  if (img.channels() != 1) {
    throw Error(ErrorCode::kUnsupportedFormat, "expected a single-channel image");
  }
  Image out(img.width(), img.height(), 3);
  for (int c = 0; c < 3; ++c) {
    std::copy(img.plane(0).begin(), img.plane(0).end(), out.plane(c).begin());
  }
  return out;
}

}  // namespace hbench
