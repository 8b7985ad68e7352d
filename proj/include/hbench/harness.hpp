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
#include <optional>
#include <string>
#include <vector>

#include "hbench/classical.hpp"
#include "hbench/metrics.hpp"
#include "hbench/synth.hpp"
#include "json.hpp"

namespace hbench {

inline constexpr const char* kToolkitVersion = "0.1.0";
inline constexpr int kWorkingWidth = 320;
inline constexpr int kWorkingHeight = 240;

// ideal, noise {0.1, 0.3, 0.5}, illumination {1.2, 1.4, 1.6},
// occlusion {0.2, 0.4, 0.6}.
std::vector<CorruptionSpec> default_grid();

struct ExperimentConfig {
  std::filesystem::path image_dir;
  std::vector<std::string> methods;  // subset of {dh, hh, classical}
  std::filesystem::path weights_dh;
  std::filesystem::path weights_hh;
  std::vector<CorruptionSpec> grid = default_grid();
  GenConfig gen;
  ClassicalConfig classical;
  std::optional<int> max_images;  // unset: every image in image_dir
  int samples_per_image = 1;
  std::uint64_t seed = 0;
  int worker_count = 1;
  std::filesystem::path out_dir = "results";

  // Throws kInvalidArgument (unknown method, bad grid entry, missing weights)
  // or kEmptyInput (no methods, empty grid, max_images == 0).
  void validate() const;
};

nlohmann::json config_to_json(const ExperimentConfig& cfg);
// Keys missing from `j` keep the values already in `base`.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});

struct ImageSeed {
  std::string image;
  std::uint64_t seed;
};

struct RunManifest {
  nlohmann::json config;
  std::vector<ImageSeed> image_seeds;
  std::string toolkit_version = kToolkitVersion;
  std::string started_at;
  std::string finished_at;

  nlohmann::json to_json() const;
};

struct RunResult {
  std::vector<AceRecord> records;  // image order, then sample, grid cell, method
  std::vector<SummaryRow> summary;
  RunManifest manifest;
};

// Loads a PNG and resizes it to the 320x240 working resolution.
Image load_working_image(const std::filesystem::path& path);

// Per-image seeds come from Rng::derive(cfg.seed, image index). Per-sample
// failures become undefined records.
RunResult run_experiment(const ExperimentConfig& cfg);

// Writes records.csv, summary.csv, curves.csv, summary.md and manifest.json.
void write_run_outputs(const RunResult& result, const std::filesystem::path& out_dir);

// One table per corruption kind: methods as rows, magnitudes as columns,
// "median / OR" cells, the lowest median in each column in bold.
std::string report_markdown(const std::vector<SummaryRow>& rows);
// Throws kSchemaError on malformed input.
std::string report_markdown_csv(std::istream& summary_csv);

struct GenerateConfig {
  std::filesystem::path image_dir;
  std::filesystem::path out_dir;
  GenConfig gen;
  std::optional<int> max_images;
  int samples_per_image = 1;
  std::uint64_t seed = 0;
  bool grayscale = true;
};

// Writes <id>_original.png, <id>_warped.png and <id>.json (corners, target
// delta, homography, seed) per generated pair. Returns the pair count.
int generate_dataset(const GenerateConfig& cfg);

}  // namespace hbench
