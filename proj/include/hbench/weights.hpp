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

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hbench/tensor.hpp"

namespace hbench {

inline constexpr std::uint32_t kWeightFormatVersion = 1;

// Named tensors, iterated in name order.
class WeightStore {
 public:
  // Throws kDuplicateName.
  void insert(std::string name, Tensor t);

  bool contains(const std::string& name) const { return entries_.count(name) != 0; }
  // Throws kWeightManifestMismatch for unknown names.
  const Tensor& get(const std::string& name) const;

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::vector<std::string> names() const;
  const std::map<std::string, Tensor>& entries() const noexcept { return entries_; }

  friend bool operator==(const WeightStore&, const WeightStore&) = default;

 private:
  std::map<std::string, Tensor> entries_;
};

// HWTS container, little-endian:
//   "HWTS" | u32 version | u32 count |
//   count x (u16 name_len | name | u8 rank | rank x u32 dim | f32 payload)
std::vector<std::uint8_t> serialize_weights(const WeightStore& store);
// Throws kBadMagic, kVersionUnsupported, kTruncatedFile, kDuplicateName,
// kShapeMismatch (rank outside 1..4 or a zero dimension) and kTrailingData.
WeightStore parse_weights(std::span<const std::uint8_t> bytes);

WeightStore load_weights(const std::filesystem::path& path);
void save_weights(const WeightStore& store, const std::filesystem::path& path);

}  // namespace hbench
