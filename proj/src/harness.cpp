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

#include "hbench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "hbench/error.hpp"
#include "hbench/image_io.hpp"
#include "hbench/models.hpp"

namespace hbench {
namespace {

using nlohmann::json;

const std::set<std::string> kMethods = {"classical", "dh", "hh"};

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<std::filesystem::path> select_images(const std::filesystem::path& dir,
                                                 const std::optional<int>& max_images) {
  auto files = list_png_files(dir);
  if (max_images && static_cast<std::size_t>(*max_images) < files.size()) {
    files.resize(static_cast<std::size_t>(*max_images));
  }
  if (files.empty()) throw Error(ErrorCode::kEmptyInput, "no PNG images in " + dir.string());
  return files;
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw Error(ErrorCode::kSchemaError, std::string("unknown key '") + it.key() + "' in " + where);
    }
  }
}

json spec_to_json(const CorruptionSpec& s) {
  return {{"kind", std::string(corruption_kind_name(s.kind))}, {"magnitude", s.magnitude}};
}

// Everything one image contributes, in record order.
class ImageJob {
 public:
  ImageJob(const ExperimentConfig& cfg, const DhModel* dh, const HierarchicalStack* hh)
      : cfg_(cfg), dh_(dh), hh_(hh), need_color_(dh && dh->config().in_channels == 6) {}

  std::vector<AceRecord> run(const std::filesystem::path& file, std::uint64_t image_seed) const {
    std::vector<AceRecord> out;
    const std::string stem = file.stem().string();
    Image rgb, gray;
    bool loaded = true;
    try {
      rgb = load_working_image(file);
      if (rgb.channels() == 1) rgb = gray_to_rgb(rgb);
      gray = to_grayscale(rgb);
    } catch (const Error&) {
      loaded = false;
    }
    for (int s = 0; s < cfg_.samples_per_image; ++s) {
      const std::string id = cfg_.samples_per_image == 1 ? stem : stem + "/" + std::to_string(s);
      const std::uint64_t pair_seed = Rng::derive(image_seed, static_cast<std::uint64_t>(s));
      std::optional<PatchPair> gray_pair, color_pair;
      if (loaded) {
        try {
          GenConfig g = cfg_.gen;
          g.seed = pair_seed;
          gray_pair = generate_pair(gray, g);
          if (need_color_) color_pair = generate_pair(rgb, g);
        } catch (const Error&) {
          gray_pair.reset();
        }
      }
      for (std::size_t c = 0; c < cfg_.grid.size(); ++c) {
        CorruptionSpec spec = cfg_.grid[c];
        spec.seed = Rng::derive(pair_seed, c + 1);
        std::optional<PatchPair> g, col;
        if (gray_pair) {
          g = apply_corruption(*gray_pair, spec);
          if (color_pair) col = apply_corruption(*color_pair, spec);
        }
        for (const auto& m : cfg_.methods) {
          AceValue v;
          if (g) v = evaluate(m, *g, col ? &*col : nullptr, spec);
          out.push_back({id, m, spec, v});
        }
      }
    }
    return out;
  }

 private:
  AceValue evaluate(const std::string& method, const PatchPair& gray, const PatchPair* color,
                    const CorruptionSpec& spec) const {
    try {
      FourPointDelta delta;
      if (method == "classical") {
        ClassicalConfig cc = cfg_.classical;
        cc.ransac.seed = Rng::derive(spec.seed, 0xC1A5);
        const ClassicalOutcome r = classical_estimate(gray, cc);
        if (!r.ok()) return std::nullopt;
        delta = *r.delta;
      } else if (method == "dh") {
        const PatchPair& p = need_color_ ? *color : gray;
        delta = dh_->forward(p.original, p.warped);
      } else {
        delta = hh_->infer(gray.original, gray.warped, gray.corners).delta;
      }
      return try_ace(gray.h_target, h4pt_to_hmat(gray.corners, delta), gray.corners);
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }

  const ExperimentConfig& cfg_;
  const DhModel* dh_;
  const HierarchicalStack* hh_;
  bool need_color_;
};

std::string format_cell(double v) {
  if (std::isnan(v)) return "NAN";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::vector<CorruptionSpec> default_grid() {
  std::vector<CorruptionSpec> g;
  auto add = [&](CorruptionKind k, double m) {
    CorruptionSpec s;
    s.kind = k;
    s.magnitude = m;
    g.push_back(s);
  };
  add(CorruptionKind::kNone, 0.0);
  for (double m : {0.1, 0.3, 0.5}) add(CorruptionKind::kNoise, m);
  for (double m : {1.2, 1.4, 1.6}) add(CorruptionKind::kIllumination, m);
  for (double m : {0.2, 0.4, 0.6}) add(CorruptionKind::kOcclusion, m);
  return g;
}

void ExperimentConfig::validate() const {
  if (methods.empty()) throw Error(ErrorCode::kEmptyInput, "no methods selected");
  std::set<std::string> seen;
  for (const auto& m : methods) {
    if (!kMethods.count(m)) throw Error(ErrorCode::kInvalidArgument, "unknown method '" + m + "'");
    if (!seen.insert(m).second) {
      throw Error(ErrorCode::kInvalidArgument, "method '" + m + "' listed twice");
    }
  }
  if (grid.empty()) throw Error(ErrorCode::kEmptyInput, "empty corruption grid");
  for (const auto& s : grid) s.validate();
  if (seen.count("dh") && weights_dh.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "method dh needs weights");
  }
  if (seen.count("hh") && weights_hh.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "method hh needs weights");
  }
  if ((seen.count("dh") || seen.count("hh")) && gen.patch_size != 128) {
    throw Error(ErrorCode::kInvalidArgument, "network methods need 128 px patches");
  }
  if (max_images && *max_images == 0) throw Error(ErrorCode::kEmptyInput, "max_images is 0");
  if (max_images && *max_images < 0) {
    throw Error(ErrorCode::kInvalidArgument, "max_images must be positive");
  }
  if (samples_per_image < 1) {
    throw Error(ErrorCode::kInvalidArgument, "samples_per_image must be at least 1");
  }
  if (worker_count < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one worker");
}

json config_to_json(const ExperimentConfig& cfg) {
  json grid = json::array();
  for (const auto& s : cfg.grid) grid.push_back(spec_to_json(s));
  return {
      {"image_dir", cfg.image_dir.string()},
      {"methods", cfg.methods},
      {"weights", {{"dh", cfg.weights_dh.string()}, {"hh", cfg.weights_hh.string()}}},
      {"grid", grid},
      {"gen", {{"patch_size", cfg.gen.patch_size}, {"rho", cfg.gen.rho}}},
      {"classical",
       {{"max_keypoints", cfg.classical.detector.max_keypoints},
        {"fast_threshold", cfg.classical.detector.fast_threshold},
        {"ratio", cfg.classical.ratio},
        {"ransac_threshold", cfg.classical.ransac.inlier_threshold},
        {"ransac_max_iterations", cfg.classical.ransac.max_iters},
        {"ransac_confidence", cfg.classical.ransac.confidence}}},
      {"max_images", cfg.max_images ? json(*cfg.max_images) : json(nullptr)},
      {"samples_per_image", cfg.samples_per_image},
      {"seed", cfg.seed},
      {"workers", cfg.worker_count},
      {"out_dir", cfg.out_dir.string()},
  };
}

ExperimentConfig config_from_json(const json& j, ExperimentConfig cfg) {
  try {
    if (!j.is_object()) throw Error(ErrorCode::kSchemaError, "config must be a JSON object");
    reject_unknown(j,
                   {"image_dir", "methods", "weights", "grid", "gen", "classical", "max_images",
                    "samples_per_image", "seed", "workers", "out_dir"},
                   "config");
    if (j.contains("image_dir")) cfg.image_dir = j.at("image_dir").get<std::string>();
    read_if(j, "methods", cfg.methods);
    if (j.contains("weights")) {
      const json& w = j.at("weights");
      reject_unknown(w, {"dh", "hh"}, "weights");
      if (w.contains("dh")) cfg.weights_dh = w.at("dh").get<std::string>();
      if (w.contains("hh")) cfg.weights_hh = w.at("hh").get<std::string>();
    }
    if (j.contains("grid")) {
      const json& g = j.at("grid");
      if (g.is_string() && g.get<std::string>() == "default") {
        cfg.grid = default_grid();
      } else {
        cfg.grid.clear();
        for (const auto& e : g) {
          reject_unknown(e, {"kind", "magnitude"}, "grid entry");
          CorruptionSpec s;
          s.kind = parse_corruption_kind(e.at("kind").get<std::string>());
          read_if(e, "magnitude", s.magnitude);
          cfg.grid.push_back(s);
        }
      }
    }
    if (j.contains("gen")) {
      const json& g = j.at("gen");
      reject_unknown(g, {"patch_size", "rho"}, "gen");
      read_if(g, "patch_size", cfg.gen.patch_size);
      read_if(g, "rho", cfg.gen.rho);
    }
    if (j.contains("classical")) {
      const json& c = j.at("classical");
      reject_unknown(c,
                     {"max_keypoints", "fast_threshold", "ratio", "ransac_threshold",
                      "ransac_max_iterations", "ransac_confidence"},
                     "classical");
      read_if(c, "max_keypoints", cfg.classical.detector.max_keypoints);
      read_if(c, "fast_threshold", cfg.classical.detector.fast_threshold);
      read_if(c, "ratio", cfg.classical.ratio);
      read_if(c, "ransac_threshold", cfg.classical.ransac.inlier_threshold);
      read_if(c, "ransac_max_iterations", cfg.classical.ransac.max_iters);
      read_if(c, "ransac_confidence", cfg.classical.ransac.confidence);
    }
    if (j.contains("max_images")) {
      cfg.max_images = j.at("max_images").is_null()
                           ? std::nullopt
                           : std::optional<int>(j.at("max_images").get<int>());
    }
    read_if(j, "samples_per_image", cfg.samples_per_image);
    read_if(j, "seed", cfg.seed);
    read_if(j, "workers", cfg.worker_count);
    if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("config: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kSchemaError) throw;
    throw Error(ErrorCode::kSchemaError, e.what());
  }
  return cfg;
}

json RunManifest::to_json() const {
  json seeds = json::array();
  for (const auto& s : image_seeds) seeds.push_back({{"image", s.image}, {"seed", s.seed}});
  return {{"toolkit_version", toolkit_version},
          {"started_at", started_at},
          {"finished_at", finished_at},
          {"config", config},
          {"image_seeds", seeds}};
}

Image load_working_image(const std::filesystem::path& path) {
  const Image img = load_image(path);
  return resize_bilinear(img, kWorkingWidth, kWorkingHeight);
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  RunResult result;
  result.manifest.started_at = utc_now();
  result.manifest.config = config_to_json(cfg);

  const auto files = select_images(cfg.image_dir, cfg.max_images);
  std::optional<DhModel> dh;
  std::optional<HierarchicalStack> hh;
  for (const auto& m : cfg.methods) {
    if (m == "dh") dh = DhModel::load(cfg.weights_dh);
    if (m == "hh") hh = HierarchicalStack::load(cfg.weights_hh);
  }

  const ImageJob job(cfg, dh ? &*dh : nullptr, hh ? &*hh : nullptr);
  std::vector<std::uint64_t> seeds(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    seeds[i] = Rng::derive(cfg.seed, i);
    result.manifest.image_seeds.push_back({files[i].filename().string(), seeds[i]});
  }

  std::vector<std::vector<AceRecord>> slots(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) slots[i] = job.run(files[i], seeds[i]);
  };
  const int threads = std::min<int>(cfg.worker_count, static_cast<int>(files.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (auto& s : slots) {
    result.records.insert(result.records.end(), std::make_move_iterator(s.begin()),
                          std::make_move_iterator(s.end()));
  }
  result.summary = summarize(result.records);
  result.manifest.finished_at = utc_now();
  return result;
}

void write_run_outputs(const RunResult& result, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto open = [&](const char* name) {
    std::ofstream f(out_dir / name, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::kIoError, "cannot write " + (out_dir / name).string());
    return f;
  };
  {
    auto f = open("records.csv");
    write_records_csv(f, result.records);
  }
  {
    auto f = open("summary.csv");
    write_summary_csv(f, result.summary);
  }
  {
    auto f = open("curves.csv");
    write_curves_csv(f, result.records);
  }
  {
    auto f = open("summary.md");
    f << report_markdown(result.summary);
  }
  {
    auto f = open("manifest.json");
    f << result.manifest.to_json().dump(2) << '\n';
  }
}

std::string report_markdown(const std::vector<SummaryRow>& rows) {
  if (rows.empty()) throw Error(ErrorCode::kSchemaError, "summary has no rows");
  std::map<CorruptionKind, std::vector<const SummaryRow*>> by_kind;
  for (const auto& r : rows) by_kind[r.kind].push_back(&r);

  std::ostringstream os;
  bool first = true;
  for (const auto& [kind, group] : by_kind) {
    std::vector<double> mags;
    std::vector<std::string> methods;
    std::map<std::pair<std::string, double>, const SummaryRow*> cell;
    for (const SummaryRow* r : group) {
      if (std::find(mags.begin(), mags.end(), r->magnitude) == mags.end()) {
        mags.push_back(r->magnitude);
      }
      if (std::find(methods.begin(), methods.end(), r->method) == methods.end()) {
        methods.push_back(r->method);
      }
      cell[{r->method, r->magnitude}] = r;
    }
    std::sort(mags.begin(), mags.end());

    if (!first) os << '\n';
    first = false;
    os << "### " << corruption_kind_name(kind) << "\n\n| method |";
    for (double m : mags) os << ' ' << format_magnitude(m) << " |";
    os << "\n|---|";
    for (std::size_t i = 0; i < mags.size(); ++i) os << "---|";
    os << '\n';

    std::map<double, double> best;
    for (double m : mags) {
      double b = INFINITY;
      for (const auto& name : methods) {
        const auto it = cell.find({name, m});
        if (it != cell.end() && !std::isnan(it->second->median_ace)) {
          b = std::min(b, it->second->median_ace);
        }
      }
      best[m] = b;
    }
    for (const auto& name : methods) {
      os << "| " << name << " |";
      for (double m : mags) {
        const auto it = cell.find({name, m});
        if (it == cell.end()) {
          os << " - |";
          continue;
        }
        const SummaryRow& r = *it->second;
        const std::string text = format_cell(r.median_ace) + " / " + format_cell(r.outlier_ratio);
        const bool bold = !std::isnan(r.median_ace) && r.median_ace == best[m];
        os << ' ' << (bold ? "**" + text + "**" : text) << " |";
      }
      os << '\n';
    }
  }
  return os.str();
}

std::string report_markdown_csv(std::istream& summary_csv) {
  return report_markdown(read_summary_csv(summary_csv));
}

int generate_dataset(const GenerateConfig& cfg) {
  if (cfg.samples_per_image < 1) {
    throw Error(ErrorCode::kInvalidArgument, "samples_per_image must be at least 1");
  }
  if (cfg.max_images && *cfg.max_images <= 0) {
    throw Error(ErrorCode::kEmptyInput, "max_images must be positive");
  }
  const auto files = select_images(cfg.image_dir, cfg.max_images);
  std::filesystem::create_directories(cfg.out_dir);
  int count = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    Image img = load_working_image(files[i]);
    if (cfg.grayscale) {
      img = to_grayscale(img);
    } else if (img.channels() == 1) {
      img = gray_to_rgb(img);
    }
    const std::uint64_t image_seed = Rng::derive(cfg.seed, i);
    for (int s = 0; s < cfg.samples_per_image; ++s) {
      GenConfig g = cfg.gen;
      g.seed = Rng::derive(image_seed, static_cast<std::uint64_t>(s));
      const PatchPair p = generate_pair(img, g);
      char id[64];
      std::snprintf(id, sizeof(id), "%06d", count);
      save_png(p.original, cfg.out_dir / (std::string(id) + "_original.png"));
      save_png(p.warped, cfg.out_dir / (std::string(id) + "_warped.png"));
      json corners = json::array();
      for (const auto& c : p.corners.c) corners.push_back({c.u, c.v});
      const auto& m = p.h_target.matrix();
      json meta = {{"source", files[i].filename().string()},
                   {"seed", g.seed},
                   {"patch_size", g.patch_size},
                   {"rho", g.rho},
                   {"corners", corners},
                   {"target", p.target.d},
                   {"h_target", std::vector<double>(m.begin(), m.end())}};
      std::ofstream(cfg.out_dir / (std::string(id) + ".json")) << meta.dump(2) << '\n';
      ++count;
    }
  }
  return count;
}

}  // namespace hbench
