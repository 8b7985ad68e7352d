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

#include "hbench/weights.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "hbench/error.hpp"

namespace hbench {
namespace {

constexpr char kMagic[4] = {'H', 'W', 'T', 'S'};

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::span<const std::uint8_t> take(std::size_t n, const char* what) {
    if (in_.size() - pos_ < n) {
      throw Error(ErrorCode::kTruncatedFile, std::string("file ends inside ") + what);
    }
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint8_t u8(const char* what) { return take(1, what)[0]; }
  std::uint16_t u16(const char* what) {
    const auto s = take(2, what);
    return static_cast<std::uint16_t>(s[0] | (s[1] << 8));
  }
  std::uint32_t u32(const char* what) {
    const auto s = take(4, what);
    return static_cast<std::uint32_t>(s[0]) | (static_cast<std::uint32_t>(s[1]) << 8) |
           (static_cast<std::uint32_t>(s[2]) << 16) | (static_cast<std::uint32_t>(s[3]) << 24);
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

void WeightStore::insert(std::string name, Tensor t) {
  if (entries_.count(name)) throw Error(ErrorCode::kDuplicateName, "duplicate tensor " + name);
  entries_.emplace(std::move(name), std::move(t));
}

const Tensor& WeightStore::get(const std::string& name) const {
  const auto it = entries_.find(name);
  if (it == entries_.end()) {
    throw Error(ErrorCode::kWeightManifestMismatch, "missing tensor " + name);
  }
  return it->second;
}

std::vector<std::string> WeightStore::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [name, _] : entries_) out.push_back(name);
  return out;
}

std::vector<std::uint8_t> serialize_weights(const WeightStore& store) {
  Writer w;
  w.bytes(kMagic, 4);
  w.u32(kWeightFormatVersion);
  w.u32(static_cast<std::uint32_t>(store.size()));
  for (const auto& [name, t] : store.entries()) {
    if (name.size() > 0xFFFF) throw Error(ErrorCode::kInvalidArgument, "tensor name too long");
    w.u16(static_cast<std::uint16_t>(name.size()));
    w.bytes(name.data(), name.size());
    w.u8(static_cast<std::uint8_t>(t.rank()));
    for (int d : t.shape()) w.u32(static_cast<std::uint32_t>(d));
    for (float v : t.values()) w.f32(v);
  }
  return w.take();
}

WeightStore parse_weights(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::kBadMagic, "not an HWTS weight file");
  }
  r.take(4, "magic");
  const std::uint32_t version = r.u32("header");
  if (version != kWeightFormatVersion) {
    throw Error(ErrorCode::kVersionUnsupported,
                "weight format version " + std::to_string(version) + " is not supported");
  }
  const std::uint32_t count = r.u32("header");
  WeightStore store;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint16_t len = r.u16("tensor name length");
    const auto name_bytes = r.take(len, "tensor name");
    std::string name(name_bytes.begin(), name_bytes.end());
    const std::uint8_t rank = r.u8("tensor rank");
    if (rank < 1 || rank > 4) {
      throw Error(ErrorCode::kShapeMismatch, name + ": rank must be 1..4");
    }
    std::vector<int> shape(rank);
    std::size_t numel = 1;
    for (auto& d : shape) {
      const std::uint32_t v = r.u32("tensor dims");
      if (v == 0 || v > 0x7FFFFFFF) throw Error(ErrorCode::kShapeMismatch, name + ": bad dim");
      d = static_cast<int>(v);
      numel *= v;
      if (numel > r.remaining() / 4 + 1) {
        throw Error(ErrorCode::kTruncatedFile, name + ": payload exceeds the file");
      }
    }
    const auto payload = r.take(numel * 4, "tensor payload");
    std::vector<float> data(numel);
    for (std::size_t k = 0; k < numel; ++k) {
      const auto* p = payload.data() + 4 * k;
      const std::uint32_t u = static_cast<std::uint32_t>(p[0]) |
                              (static_cast<std::uint32_t>(p[1]) << 8) |
                              (static_cast<std::uint32_t>(p[2]) << 16) |
                              (static_cast<std::uint32_t>(p[3]) << 24);
      data[k] = std::bit_cast<float>(u);
    }
    store.insert(std::move(name), Tensor(std::move(shape), std::move(data)));
  }
  if (r.remaining() != 0) {
    throw Error(ErrorCode::kTrailingData,
                std::to_string(r.remaining()) + " bytes after the last tensor");
  }
  return store;
}

WeightStore load_weights(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return parse_weights(bytes);
}

void save_weights(const WeightStore& store, const std::filesystem::path& path) {
  const auto bytes = serialize_weights(store);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "short write to " + path.string());
}

}  // namespace hbench
