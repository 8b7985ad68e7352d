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

#include "hbench/image_io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "test_util.hpp"

namespace hbench {
namespace {

std::filesystem::path temp_dir() {
  auto d = std::filesystem::temp_directory_path() / "hbench_image_io_test";
  std::filesystem::create_directories(d);
  return d;
}

TEST(LoadImageTest, BlackWhiteAndGray) {
  const auto dir = temp_dir();
  for (const auto& [value, expected] :
       std::vector<std::pair<float, float>>{{-1.0f, -1.0f}, {1.0f, 1.0f}}) {
    save_png(Image(5, 4, 3, value), dir / "flat.png");
    const Image img = load_image(dir / "flat.png");
    ASSERT_EQ(img.channels(), 3);
    for (float v : img.data()) EXPECT_EQ(v, expected);
  }
  // (128 / 127.5 - 1) encodes back to code 128.
  save_png(Image(3, 3, 1, static_cast<float>(128 / 127.5 - 1.0)), dir / "mid.png");
  const Image mid = load_image(dir / "mid.png");
  ASSERT_EQ(mid.channels(), 1);
  for (float v : mid.data()) EXPECT_NEAR(v, 0.00392, 1e-5);
}

TEST(LoadImageTest, RoundTripOfEightBitValues) {
  Image img(16, 8, 3);
  for (std::size_t i = 0; i < img.data().size(); ++i) {
    img.data()[i] = static_cast<float>((i * 37 % 256) / 127.5 - 1.0);
  }
  const auto path = temp_dir() / "rt.png";
  save_png(img, path);
  const Image back = load_image(path);
  ASSERT_EQ(back.width(), 16);
  ASSERT_EQ(back.height(), 8);
  for (std::size_t i = 0; i < img.data().size(); ++i) {
    EXPECT_EQ(back.data()[i], img.data()[i]) << i;
  }
}

TEST(LoadImageTest, Errors) {
  const auto dir = temp_dir();
  std::ofstream(dir / "junk.png") << "definitely not a png";
  EXPECT_HBENCH_ERROR(load_image(dir / "junk.png"), ErrorCode::kUnsupportedFormat);
  EXPECT_HBENCH_ERROR(load_image(dir / "absent.png"), ErrorCode::kIoError);

  save_png(Image(32, 32, 1, 0.5f), dir / "ok.png");
  std::ifstream in(dir / "ok.png", std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::ofstream(dir / "cut.png", std::ios::binary) << bytes.substr(0, bytes.size() / 2);
  EXPECT_HBENCH_ERROR(load_image(dir / "cut.png"), ErrorCode::kDecodeError);
}

TEST(LoadImageTest, BundledTexturesAreRgb320x240) {
  const auto files = list_png_files(std::filesystem::path(HBENCH_TEST_DATA_DIR) / "textures");
  ASSERT_EQ(files.size(), 50u);
  const Image img = load_image(files.front());
  EXPECT_EQ(img.width(), 320);
  EXPECT_EQ(img.height(), 240);
  EXPECT_EQ(img.channels(), 3);
}

TEST(ResizeTest, SameSizeIsIdentity) {
  Image img(7, 5, 2);
  for (std::size_t i = 0; i < img.data().size(); ++i) img.data()[i] = 0.01f * i;
  EXPECT_EQ(resize_bilinear(img, 7, 5), img);
}

TEST(ResizeTest, ConstantStaysConstant) {
  const Image out = resize_bilinear(Image(31, 17, 3, 0.25f), 320, 240);
  for (float v : out.data()) EXPECT_FLOAT_EQ(v, 0.25f);
}

TEST(ResizeTest, TwoByTwoToOneIsMean) {
  Image img(2, 2, 1);
  img.data() = {0.1f, 0.2f, 0.4f, 0.9f};
  EXPECT_FLOAT_EQ(resize_bilinear(img, 1, 1).at(0, 0, 0), 0.4f);
}

TEST(ResizeTest, UpsampleCenterAlignment) {
  Image img(2, 1, 1);
  img.data() = {0.0f, 1.0f};
  const Image out = resize_bilinear(img, 4, 1);
  // Sources at -0.25, 0.25, 0.75, 1.25 clamp to [0, 1].
  EXPECT_FLOAT_EQ(out.at(0, 0, 0), 0.0f);
  EXPECT_FLOAT_EQ(out.at(0, 0, 1), 0.25f);
  EXPECT_FLOAT_EQ(out.at(0, 0, 2), 0.75f);
  EXPECT_FLOAT_EQ(out.at(0, 0, 3), 1.0f);
  EXPECT_HBENCH_ERROR(resize_bilinear(img, 0, 3), ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace hbench
