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

#include <filesystem>
#include <vector>

#include "hbench/image.hpp"

namespace hbench {

// Decodes an 8-bit grayscale or RGB PNG (alpha is dropped) into [-1, 1] via
// v / 127.5 - 1. Palette images are expanded to RGB.
Image load_image(const std::filesystem::path& path);

// Encodes a 1- or 3-channel image as an 8-bit PNG, clipping to [-1, 1].
void save_png(const Image& img, const std::filesystem::path& path);

// Bilinear resampling with pixel-center alignment: output pixel x samples the
// source at (x + 0.5) * src_w / dst_w - 0.5, clamped to the border.
Image resize_bilinear(const Image& img, int width, int height);

// Sorted *.png files of a directory (non-recursive).
std::vector<std::filesystem::path> list_png_files(const std::filesystem::path& dir);

}  // namespace hbench
