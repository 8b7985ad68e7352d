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

#include "hbench/models.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "hbench/error.hpp"
#include "hbench/nn.hpp"

namespace hbench {
namespace {

[[noreturn]] void mismatch(const std::string& msg) {
  throw Error(ErrorCode::kWeightManifestMismatch, msg);
}

std::string shape_text(const std::vector<int>& shape) {
  std::string s;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += 'x';
    s += std::to_string(shape[i]);
  }
  return s;
}

void add_conv(std::vector<TensorSpec>& out, const std::string& name, int in, int width) {
  out.push_back({name + ".weight", {width, in, 3, 3}});
  out.push_back({name + ".bias", {width}});
  for (const char* p : {".bn.gamma", ".bn.beta", ".bn.mean", ".bn.var"}) {
    out.push_back({name + p, {width}});
  }
}

void add_head(std::vector<TensorSpec>& out, const std::string& prefix, int flat, int hidden) {
  out.push_back({prefix + "fc1.weight", {hidden, flat}});
  out.push_back({prefix + "fc1.bias", {hidden}});
  out.push_back({prefix + "fc2.weight", {kDeltaSize, hidden}});
  out.push_back({prefix + "fc2.bias", {kDeltaSize}});
}

void sort_specs(std::vector<TensorSpec>& specs) {
  std::sort(specs.begin(), specs.end(),
            [](const TensorSpec& a, const TensorSpec& b) { return a.name < b.name; });
}

int dim_of(const WeightStore& w, const std::string& name, int rank, int axis) {
  const Tensor& t = w.get(name);
  if (t.rank() != rank) mismatch(name + " has shape " + t.shape_string());
  return t.dim(axis);
}

Tensor conv_block(const WeightStore& w, const std::string& name, const Tensor& x) {
  Tensor y = conv2d(x, w.get(name + ".weight"), w.get(name + ".bias"));
  y = batchnorm_inference(y, w.get(name + ".bn.gamma"), w.get(name + ".bn.beta"),
                          w.get(name + ".bn.mean"), w.get(name + ".bn.var"));
  return relu(y);
}

FourPointDelta head(const WeightStore& w, const std::string& prefix, const Tensor& features) {
  Tensor h = relu(linear(flatten(features), w.get(prefix + "fc1.weight"),
                         w.get(prefix + "fc1.bias")));
  const Tensor out = linear(h, w.get(prefix + "fc2.weight"), w.get(prefix + "fc2.bias"));
  FourPointDelta d;
  for (int i = 0; i < kDeltaSize; ++i) d.d[i] = out[static_cast<std::size_t>(i)];
  return d;
}

void require_patch(const Image& img, int channels, const char* what) {
  if (img.width() != kModelPatchSize || img.height() != kModelPatchSize) {
    throw Error(ErrorCode::kShapeMismatch, std::string(what) + " must be 128x128");
  }
  if (img.channels() != channels) {
    throw Error(ErrorCode::kShapeMismatch, std::string(what) + " must have " +
                                               std::to_string(channels) + " channel(s)");
  }
}

Tensor image_tensor(const Image& img) {
  return Tensor({1, img.channels(), img.height(), img.width()}, img.data());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) mismatch("manifest not found: " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

void DhConfig::validate() const {
  if (in_channels != 2 && in_channels != 6) {
    throw Error(ErrorCode::kInvalidArgument, "DH input must have 2 or 6 channels");
  }
  for (int v : conv_widths) {
    if (v <= 0) throw Error(ErrorCode::kInvalidArgument, "conv widths must be positive");
  }
  if (fc_hidden <= 0) throw Error(ErrorCode::kInvalidArgument, "fc_hidden must be positive");
}

void HhModuleConfig::validate() const {
  for (int v : branch_widths) {
    if (v <= 0) throw Error(ErrorCode::kInvalidArgument, "branch widths must be positive");
  }
  for (int v : merged_widths) {
    if (v <= 0) throw Error(ErrorCode::kInvalidArgument, "merged widths must be positive");
  }
  if (fc_hidden <= 0) throw Error(ErrorCode::kInvalidArgument, "fc_hidden must be positive");
}

std::vector<TensorSpec> dh_tensor_specs(const DhConfig& cfg) {
  cfg.validate();
  std::vector<TensorSpec> out;
  int in = cfg.in_channels;
  for (int k = 0; k < 8; ++k) {
    add_conv(out, "conv" + std::to_string(k + 1), in, cfg.conv_widths[k]);
    in = cfg.conv_widths[k];
  }
  add_head(out, "", in * 16 * 16, cfg.fc_hidden);
  sort_specs(out);
  return out;
}

std::vector<TensorSpec> hh_tensor_specs(const HhModuleConfig& cfg, const std::string& prefix) {
  cfg.validate();
  std::vector<TensorSpec> out;
  int in = 1;
  for (int k = 0; k < 4; ++k) {
    add_conv(out, prefix + "branch.conv" + std::to_string(k + 1), in, cfg.branch_widths[k]);
    in = cfg.branch_widths[k];
  }
  in *= 2;
  for (int k = 0; k < 4; ++k) {
    add_conv(out, prefix + "conv" + std::to_string(k + 5), in, cfg.merged_widths[k]);
    in = cfg.merged_widths[k];
  }
  add_head(out, prefix, in * 16 * 16, cfg.fc_hidden);
  sort_specs(out);
  return out;
}

DhConfig infer_dh_config(const WeightStore& w) {
  DhConfig cfg;
  cfg.in_channels = dim_of(w, "conv1.weight", 4, 1);
  for (int k = 0; k < 8; ++k) {
    cfg.conv_widths[k] = dim_of(w, "conv" + std::to_string(k + 1) + ".weight", 4, 0);
  }
  cfg.fc_hidden = dim_of(w, "fc1.weight", 2, 0);
  try {
    cfg.validate();
  } catch (const Error& e) {
    mismatch(e.what());
  }
  return cfg;
}

HhModuleConfig infer_hh_config(const WeightStore& w, const std::string& prefix) {
  HhModuleConfig cfg;
  for (int k = 0; k < 4; ++k) {
    cfg.branch_widths[k] =
        dim_of(w, prefix + "branch.conv" + std::to_string(k + 1) + ".weight", 4, 0);
    cfg.merged_widths[k] = dim_of(w, prefix + "conv" + std::to_string(k + 5) + ".weight", 4, 0);
  }
  cfg.fc_hidden = dim_of(w, prefix + "fc1.weight", 2, 0);
  return cfg;
}

void validate_against(const WeightStore& w, const std::vector<TensorSpec>& specs) {
  for (const auto& s : specs) {
    if (!w.contains(s.name)) mismatch("missing tensor " + s.name);
    const Tensor& t = w.get(s.name);
    if (t.shape() != s.shape) {
      mismatch(s.name + " has shape " + t.shape_string() + ", expected " + shape_text(s.shape));
    }
  }
  if (w.size() != specs.size()) {
    std::map<std::string, bool> known;
    for (const auto& s : specs) known[s.name] = true;
    for (const auto& name : w.names()) {
      if (!known.count(name)) mismatch("unexpected tensor " + name);
    }
  }
}

std::string format_manifest(const std::string& model, const WeightStore& w) {
  std::ostringstream os;
  os << "hwts-manifest 1\nmodel " << model << '\n';
  for (const auto& [name, t] : w.entries()) os << name << ' ' << shape_text(t.shape()) << '\n';
  return os.str();
}

void check_manifest(const std::string& text, const std::string& model, const WeightStore& w) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "hwts-manifest 1") mismatch("bad manifest header");
  if (!std::getline(in, line) || line != "model " + model) {
    mismatch("manifest is not for model " + model);
  }
  std::map<std::string, std::string> listed;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string name, shape, extra;
    if (!(fields >> name >> shape) || (fields >> extra)) mismatch("bad manifest line: " + line);
    if (!listed.emplace(name, shape).second) mismatch("manifest lists " + name + " twice");
  }
  for (const auto& [name, t] : w.entries()) {
    const auto it = listed.find(name);
    if (it == listed.end()) mismatch("tensor " + name + " is not in the manifest");
    if (it->second != shape_text(t.shape())) {
      mismatch("manifest shape for " + name + " is " + it->second + ", file has " +
               shape_text(t.shape()));
    }
  }
  if (listed.size() != w.size()) {
    for (const auto& [name, _] : listed) {
      if (!w.contains(name)) mismatch("manifest tensor " + name + " is missing from the file");
    }
  }
}

std::filesystem::path manifest_path_for(const std::filesystem::path& weights) {
  std::filesystem::path p = weights;
  return p.replace_extension(".manifest");
}

Tensor stack_pair(const Image& original, const Image& warped) {
  if (original.width() != warped.width() || original.height() != warped.height() ||
      original.channels() != warped.channels()) {
    throw Error(ErrorCode::kShapeMismatch, "patch pair halves differ in shape");
  }
  return concat_channels(image_tensor(original), image_tensor(warped));
}

FourPointDelta dh_forward(const WeightStore& w, const DhConfig& cfg, const Image& original,
                          const Image& warped) {
  cfg.validate();
  require_patch(original, cfg.in_channels / 2, "original patch");
  require_patch(warped, cfg.in_channels / 2, "warped patch");
  Tensor x = stack_pair(original, warped);
  for (int k = 1; k <= 8; ++k) {
    if (k == 3 || k == 5 || k == 7) x = maxpool2(x);
    x = conv_block(w, "conv" + std::to_string(k), x);
  }
  return head(w, "", x);
}

FourPointDelta hh_module_forward(const WeightStore& w, const HhModuleConfig& cfg,
                                 const Image& original, const Image& warped,
                                 const std::string& prefix) {
  cfg.validate();
  require_patch(original, 1, "original patch");
  require_patch(warped, 1, "warped patch");
  auto branch = [&](const Image& img) {
    Tensor x = image_tensor(img);
    for (int k = 1; k <= 4; ++k) {
      x = conv_block(w, prefix + "branch.conv" + std::to_string(k), x);
      if (k == 2) x = maxpool2(x);
    }
    return x;
  };
  Tensor x = concat_channels(branch(original), branch(warped));
  for (int k = 5; k <= 8; ++k) {
    x = conv_block(w, prefix + "conv" + std::to_string(k), x);
    if (k == 5 || k == 7) x = maxpool2(x);
  }
  return head(w, prefix, x);
}

DhModel::DhModel(WeightStore weights) : weights_(std::move(weights)) {
  cfg_ = infer_dh_config(weights_);
  validate_against(weights_, dh_tensor_specs(cfg_));
}

DhModel DhModel::load(const std::filesystem::path& path) {
  WeightStore w = load_weights(path);
  check_manifest(read_text(manifest_path_for(path)), "dh", w);
  return DhModel(std::move(w));
}

FourPointDelta residual_target(const FourPointDelta& prev_target,
                               const FourPointDelta& prev_estimate) {
  FourPointDelta out;
  for (int i = 0; i < kDeltaSize; ++i) out.d[i] = prev_target.d[i] - prev_estimate.d[i];
  return out;
}

StackResult run_stack(int modules, const ModuleEstimator& estimate, const Image& original,
                      const Image& warped, const PatchCorners& corners) {
  if (modules < 1) throw Error(ErrorCode::kInvalidArgument, "stack needs at least one module");
  PatchCorners local = corners;
  for (auto& c : local.c) c = {c.u - corners.c[0].u, c.v - corners.c[0].v};

  StackResult result;
  Image current = warped;
  for (int i = 0; i < modules; ++i) {
    const FourPointDelta d = estimate(i, original, current);
    for (int k = 0; k < kDeltaSize; ++k) result.delta.d[k] += d.d[k];
    result.per_module.push_back(d);
    bool skipped = false;
    if (i + 1 < modules) {
      std::array<Point2, 4> moved;
      for (int k = 0; k < 4; ++k) {
        moved[k] = {local.c[k].u + d.corner(k).u, local.c[k].v + d.corner(k).v};
      }
      if (!is_convex_quad(moved)) {
        skipped = true;
      } else {
        try {
          const Homography h = h4pt_to_hmat(local, d);
          current = warp_image(current, h, current.width(), current.height(), 0.0f);
        } catch (const Error&) {
          skipped = true;
        }
      }
    }
    result.rewarp_skipped.push_back(skipped);
  }
  return result;
}

HierarchicalStack::HierarchicalStack(WeightStore weights) : weights_(std::move(weights)) {
  std::vector<TensorSpec> all;
  if (weights_.contains("branch.conv1.weight")) {
    prefixes_.push_back("");
  } else {
    for (int i = 1; weights_.contains("module" + std::to_string(i) + ".branch.conv1.weight"); ++i) {
      prefixes_.push_back("module" + std::to_string(i) + ".");
    }
  }
  if (prefixes_.empty()) mismatch("no HH module tensors found");
  for (const auto& p : prefixes_) {
    configs_.push_back(infer_hh_config(weights_, p));
    const auto specs = hh_tensor_specs(configs_.back(), p);
    all.insert(all.end(), specs.begin(), specs.end());
  }
  validate_against(weights_, all);
}

HierarchicalStack HierarchicalStack::load(const std::filesystem::path& path) {
  HierarchicalStack stack(load_weights(path));
  check_manifest(read_text(manifest_path_for(path)), stack.manifest_model(), stack.weights_);
  return stack;
}

std::string HierarchicalStack::manifest_model() const {
  return prefixes_.size() == 1 && prefixes_[0].empty() ? "hh" : "hh_stack";
}

FourPointDelta HierarchicalStack::module_forward(int i, const Image& original,
                                                 const Image& warped) const {
  return hh_module_forward(weights_, config(i), original, warped, prefix(i));
}

StackResult HierarchicalStack::infer(const Image& original, const Image& warped,
                                     const PatchCorners& corners) const {
  return run_stack(
      size(),
      [this](int i, const Image& o, const Image& w) { return module_forward(i, o, w); },
      original, warped, corners);
}

FourPointDelta hh_stack_infer(const HierarchicalStack& stack, const Image& original,
                              const Image& warped, const PatchCorners& corners) {
  return stack.infer(original, warped, corners).delta;
}

}  // namespace hbench
