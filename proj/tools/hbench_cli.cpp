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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "hbench/error.hpp"
#include "hbench/harness.hpp"
#include "hbench/models.hpp"
#include "hbench/weights.hpp"
#include "json.hpp"

namespace {

using namespace hbench;

struct EvalFlags {
  std::string config;
  std::string images;
  std::vector<std::string> methods;
  std::string weights_dh;
  std::string weights_hh;
  std::string corruption;
  std::vector<double> magnitudes;
  bool grid_default = false;
  int max_images = 0;
  std::uint64_t seed = 0;
  int workers = 1;
  int samples = 1;
  std::string out_dir;
};

std::vector<double> table_magnitudes(CorruptionKind kind) {
  std::vector<double> out;
  for (const auto& s : default_grid()) {
    if (s.kind == kind) out.push_back(s.magnitude);
  }
  return out;
}

ExperimentConfig build_config(const EvalFlags& f, const CLI::App& cmd) {
  ExperimentConfig cfg;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw Error(ErrorCode::kIoError, "cannot read " + f.config);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kSchemaError, f.config + ": " + e.what());
    }
    cfg = config_from_json(j);
  }
  auto given = [&](const char* name) { return cmd.count(name) > 0; };
  if (given("--images")) cfg.image_dir = f.images;
  if (given("--methods")) cfg.methods = f.methods;
  if (given("--weights-dh")) cfg.weights_dh = f.weights_dh;
  if (given("--weights-hh")) cfg.weights_hh = f.weights_hh;
  if (given("--grid-default")) cfg.grid = default_grid();
  if (given("--corruption")) {
    const CorruptionKind kind = parse_corruption_kind(f.corruption);
    std::vector<double> mags = f.magnitudes;
    if (mags.empty()) mags = kind == CorruptionKind::kNone ? std::vector<double>{0.0}
                                                           : table_magnitudes(kind);
    cfg.grid.clear();
    for (double m : mags) {
      CorruptionSpec s;
      s.kind = kind;
      s.magnitude = kind == CorruptionKind::kNone ? 0.0 : m;
      cfg.grid.push_back(s);
    }
  } else if (given("--magnitude")) {
    throw Error(ErrorCode::kInvalidArgument, "--magnitude needs --corruption");
  }
  if (given("--max-images")) cfg.max_images = f.max_images;
  if (given("--seed")) cfg.seed = f.seed;
  if (given("--workers")) cfg.worker_count = f.workers;
  if (given("--samples-per-image")) cfg.samples_per_image = f.samples;
  if (given("--out-dir")) cfg.out_dir = f.out_dir;
  return cfg;
}

int run_eval(const EvalFlags& f, const CLI::App& cmd) {
  const ExperimentConfig cfg = build_config(f, cmd);
  const RunResult result = run_experiment(cfg);
  write_run_outputs(result, cfg.out_dir);
  std::cout << report_markdown(result.summary);
  std::cerr << result.records.size() << " records written to " << cfg.out_dir.string() << '\n';
  return 0;
}

std::string model_kind(const WeightStore& w) {
  if (w.contains("branch.conv1.weight")) return "hh";
  if (w.contains("module1.branch.conv1.weight")) return "hh_stack";
  return "dh";
}

int run_inspect(const std::string& path, bool check) {
  const WeightStore w = load_weights(path);
  const std::string kind = model_kind(w);
  std::size_t params = 0;
  for (const auto& [_, t] : w.entries()) params += t.numel();
  std::cout << format_manifest(kind, w);
  std::cerr << w.size() << " tensors, " << params << " parameters\n";
  if (check) {
    if (kind == "dh") {
      const DhModel m = DhModel::load(path);
      std::cerr << "manifest ok: dh, " << m.config().in_channels << " input channels\n";
    } else {
      const HierarchicalStack s = HierarchicalStack::load(path);
      std::cerr << "manifest ok: " << s.manifest_model() << ", " << s.size() << " module(s)\n";
    }
  }
  return 0;
}

int run_report(const std::string& summary, const std::string& out) {
  std::ifstream in(summary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + summary);
  const std::string md = report_markdown_csv(in);
  if (out.empty()) {
    std::cout << md;
  } else {
    std::ofstream(out) << md;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Homography estimation robustness benchmark"};
  app.set_version_flag("--version", std::string(hbench::kToolkitVersion));
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "Write patch-pair datasets as PNG + JSON");
  hbench::GenerateConfig gcfg;
  std::string gen_images, gen_out;
  int gen_max = 0;
  bool gen_color = false;
  gen->add_option("--images", gen_images, "Directory of PNG images")->required();
  gen->add_option("--out-dir", gen_out, "Output directory")->required();
  gen->add_option("--max-images", gen_max, "Use at most this many images");
  gen->add_option("--samples-per-image", gcfg.samples_per_image, "Pairs per image");
  gen->add_option("--seed", gcfg.seed, "Base seed");
  gen->add_option("--patch-size", gcfg.gen.patch_size, "Patch side in pixels");
  gen->add_option("--rho", gcfg.gen.rho, "Corner perturbation bound in pixels");
  gen->add_flag("--color", gen_color, "Keep RGB patches");

  auto* eval = app.add_subcommand("eval", "Run an experiment grid");
  EvalFlags ef;
  eval->add_option("--config", ef.config, "JSON config; flags override its values");
  eval->add_option("--images", ef.images, "Directory of PNG images");
  eval->add_option("--methods", ef.methods, "Any of classical, dh, hh")->delimiter(',');
  eval->add_option("--weights-dh", ef.weights_dh, "DH weight file (.hwts)");
  eval->add_option("--weights-hh", ef.weights_hh, "HH stack weight file (.hwts)");
  auto* corr = eval->add_option("--corruption", ef.corruption,
                                "none, noise, illumination or occlusion");
  eval->add_option("--magnitude", ef.magnitudes, "Magnitudes for --corruption")->delimiter(',');
  eval->add_flag("--grid-default", ef.grid_default, "Full default grid")->excludes(corr);
  eval->add_option("--max-images", ef.max_images, "Use at most this many images");
  eval->add_option("--seed", ef.seed, "Base seed");
  eval->add_option("--workers", ef.workers, "Worker threads");
  eval->add_option("--samples-per-image", ef.samples, "Pairs per image");
  eval->add_option("--out-dir", ef.out_dir, "Output directory");

  auto* report = app.add_subcommand("report", "Render a summary CSV as markdown tables");
  std::string summary_path, report_out;
  report->add_option("summary", summary_path, "summary.csv")->required();
  report->add_option("--out", report_out, "Write to a file instead of stdout");

  auto* inspect = app.add_subcommand("weights-inspect", "Print the manifest of an HWTS file");
  std::string weights_path;
  bool check = false;
  inspect->add_option("weights", weights_path, "Weight file")->required();
  inspect->add_flag("--check", check, "Validate against the sibling .manifest");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      gcfg.image_dir = gen_images;
      gcfg.out_dir = gen_out;
      if (gen->count("--max-images")) gcfg.max_images = gen_max;
      gcfg.grayscale = !gen_color;
      const int n = hbench::generate_dataset(gcfg);
      std::cerr << n << " pairs written to " << gen_out << '\n';
      return 0;
    }
    if (*eval) return run_eval(ef, *eval);
    if (*report) return run_report(summary_path, report_out);
    if (*inspect) return run_inspect(weights_path, check);
  } catch (const hbench::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
