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

// Python bindings. Images cross the boundary as float32 arrays shaped
// (channels, height, width); homographies as 3x3 float64 arrays.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "hbench/classical.hpp"
#include "hbench/error.hpp"
#include "hbench/geometry.hpp"
#include "hbench/harness.hpp"
#include "hbench/image_io.hpp"
#include "hbench/metrics.hpp"
#include "hbench/models.hpp"
#include "hbench/synth.hpp"
#include "hbench/weights.hpp"

namespace py = pybind11;
using namespace hbench;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;
using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Image image_from_array(const FloatArray& a) {
  if (a.ndim() == 2) {
    Image img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)), 1);
    std::memcpy(img.data().data(), a.data(), sizeof(float) * a.size());
    return img;
  }
  if (a.ndim() != 3) throw Error(ErrorCode::kShapeMismatch, "image must be (C, H, W) or (H, W)");
  Image img(static_cast<int>(a.shape(2)), static_cast<int>(a.shape(1)),
            static_cast<int>(a.shape(0)));
  std::memcpy(img.data().data(), a.data(), sizeof(float) * a.size());
  return img;
}

FloatArray image_to_array(const Image& img) {
  FloatArray a({img.channels(), img.height(), img.width()});
  std::memcpy(a.mutable_data(), img.data().data(), sizeof(float) * img.data().size());
  return a;
}

DoubleArray matrix_to_array(const Homography& h) {
  DoubleArray a({3, 3});
  std::memcpy(a.mutable_data(), h.matrix().data(), sizeof(double) * 9);
  return a;
}

Homography matrix_from_array(const DoubleArray& a) {
  if (a.size() != 9) throw Error(ErrorCode::kShapeMismatch, "homography must have 9 entries");
  std::array<double, 9> m{};
  std::memcpy(m.data(), a.data(), sizeof(double) * 9);
  return Homography::from_matrix(m);
}

PatchCorners corners_from_array(const DoubleArray& a) {
  if (a.size() != 8) throw Error(ErrorCode::kShapeMismatch, "corners must be 4x2");
  PatchCorners c;
  for (int i = 0; i < 4; ++i) c.c[i] = {a.data()[2 * i], a.data()[2 * i + 1]};
  return c;
}

DoubleArray corners_to_array(const PatchCorners& c) {
  DoubleArray a({4, 2});
  for (int i = 0; i < 4; ++i) {
    a.mutable_data()[2 * i] = c.c[i].u;
    a.mutable_data()[2 * i + 1] = c.c[i].v;
  }
  return a;
}

FourPointDelta delta_from_array(const DoubleArray& a) {
  if (a.size() != 8) throw Error(ErrorCode::kShapeMismatch, "delta must have 8 entries");
  FourPointDelta d;
  std::memcpy(d.d.data(), a.data(), sizeof(double) * 8);
  return d;
}

DoubleArray delta_to_array(const FourPointDelta& d) {
  DoubleArray a(std::vector<py::ssize_t>{8});
  std::memcpy(a.mutable_data(), d.d.data(), sizeof(double) * 8);
  return a;
}

py::dict pair_to_dict(const PatchPair& p) {
  py::dict d;
  d["original"] = image_to_array(p.original);
  d["warped"] = image_to_array(p.warped);
  d["target"] = delta_to_array(p.target);
  d["corners"] = corners_to_array(p.corners);
  d["h_target"] = matrix_to_array(p.h_target);
  return d;
}

PatchPair pair_from_dict(const py::dict& d) {
  PatchPair p;
  p.original = image_from_array(d["original"].cast<FloatArray>());
  p.warped = image_from_array(d["warped"].cast<FloatArray>());
  p.target = delta_from_array(d["target"].cast<DoubleArray>());
  p.corners = corners_from_array(d["corners"].cast<DoubleArray>());
  p.h_target = matrix_from_array(d["h_target"].cast<DoubleArray>());
  return p;
}

WeightStore store_from_dict(const py::dict& tensors) {
  WeightStore store;
  for (auto [k, v] : tensors) {
    const auto a = v.cast<FloatArray>();
    std::vector<int> shape(a.shape(), a.shape() + a.ndim());
    std::vector<float> data(a.data(), a.data() + a.size());
    store.insert(k.cast<std::string>(), Tensor(std::move(shape), std::move(data)));
  }
  return store;
}

py::dict store_to_dict(const WeightStore& store) {
  py::dict out;
  for (const auto& [name, t] : store.entries()) {
    std::vector<py::ssize_t> shape(t.shape().begin(), t.shape().end());
    FloatArray a(shape);
    std::memcpy(a.mutable_data(), t.data(), sizeof(float) * t.numel());
    out[py::str(name)] = a;
  }
  return out;
}

nlohmann::json json_from_py(const py::object& obj) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

py::object json_to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

py::object ace_to_py(const AceValue& v) { return v ? py::object(py::float_(*v)) : py::none(); }

py::list summary_to_list(const std::vector<SummaryRow>& rows) {
  py::list out;
  for (const auto& r : rows) {
    py::dict d;
    d["method"] = r.method;
    d["corruption"] = std::string(corruption_kind_name(r.kind));
    d["magnitude"] = r.magnitude;
    d["median_ace"] = r.median_ace;
    d["outlier_ratio"] = r.outlier_ratio;
    d["n"] = r.n;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_hbench, m) {
  m.doc() = "Native core of the homography benchmark toolkit";
  m.attr("__version__") = std::string(kToolkitVersion);

  static py::exception<Error> error_type(m, "HbenchError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::reinterpret_borrow<py::object>(error_type)(e.what());
      inst.attr("code") = std::string(error_code_name(e.code()));
      PyErr_SetObject(error_type.ptr(), inst.ptr());
    }
  });

  // geometry
  m.def(
      "h4pt_to_hmat",
      [](const DoubleArray& corners, const DoubleArray& delta) {
        return matrix_to_array(h4pt_to_hmat(corners_from_array(corners), delta_from_array(delta)));
      },
      py::arg("corners"), py::arg("delta"));
  m.def(
      "hmat_to_h4pt",
      [](const DoubleArray& h, const DoubleArray& corners) {
        return delta_to_array(hmat_to_h4pt(matrix_from_array(h), corners_from_array(corners)));
      },
      py::arg("h"), py::arg("corners"));
  m.def(
      "square_corners",
      [](double x0, double y0, int size) { return corners_to_array(PatchCorners::square(x0, y0, size)); },
      py::arg("x0"), py::arg("y0"), py::arg("size"));
  m.def(
      "warp_image",
      [](const FloatArray& img, const DoubleArray& h, int w, int hgt, float fill) {
        return image_to_array(warp_image(image_from_array(img), matrix_from_array(h), w, hgt, fill));
      },
      py::arg("image"), py::arg("h"), py::arg("width"), py::arg("height"), py::arg("fill") = 0.0f);

  // images
  m.def(
      "load_image", [](const std::filesystem::path& p) { return image_to_array(load_image(p)); },
      py::arg("path"));
  m.def(
      "load_working_image",
      [](const std::filesystem::path& p) { return image_to_array(load_working_image(p)); },
      py::arg("path"), "Load a PNG resized to the 320x240 working resolution.");
  m.def(
      "to_grayscale", [](const FloatArray& img) { return image_to_array(to_grayscale(image_from_array(img))); },
      py::arg("image"));

  // synth
  m.def(
      "generate_pair",
      [](const FloatArray& img, int patch_size, int rho, std::uint64_t seed) {
        return pair_to_dict(generate_pair(image_from_array(img), {patch_size, rho, seed}));
      },
      py::arg("image"), py::arg("patch_size") = 128, py::arg("rho") = 32, py::arg("seed") = 0);
  m.def(
      "apply_corruption",
      [](const py::dict& pair, const std::string& kind, double magnitude, std::uint64_t seed) {
        CorruptionSpec spec;
        spec.kind = parse_corruption_kind(kind);
        spec.magnitude = magnitude;
        spec.seed = seed;
        return pair_to_dict(apply_corruption(pair_from_dict(pair), spec));
      },
      py::arg("pair"), py::arg("kind"), py::arg("magnitude"), py::arg("seed") = 0);

  // classical
  m.def(
      "classical_estimate",
      [](const py::dict& pair) -> py::object {
        const ClassicalOutcome o = classical_estimate(pair_from_dict(pair));
        if (!o.ok()) return py::none();
        return delta_to_array(*o.delta);
      },
      py::arg("pair"), "Four-point delta from the feature pipeline, or None on failure.");

  // metrics
  m.def(
      "ace",
      [](const DoubleArray& est, const DoubleArray& truth, const DoubleArray& corners) {
        return ace(matrix_from_array(est), matrix_from_array(truth), corners_from_array(corners));
      },
      py::arg("h_est"), py::arg("h_true"), py::arg("corners"));
  m.def(
      "median_ace",
      [](const std::vector<std::optional<double>>& v) { return median_ace(v); }, py::arg("values"));
  m.def(
      "outlier_ratio",
      [](const std::vector<std::optional<double>>& v, double thr) { return outlier_ratio(v, thr); },
      py::arg("values"), py::arg("threshold") = kOutlierAce);

  // weights
  m.def(
      "load_weights", [](const std::filesystem::path& p) { return store_to_dict(load_weights(p)); },
      py::arg("path"));
  m.def(
      "save_weights",
      [](const std::filesystem::path& path, const py::dict& tensors, const std::string& model) {
        WeightStore store = store_from_dict(tensors);
        if (model == "dh") {
          DhModel check(store);
        } else if (model == "hh" || model == "hh_stack") {
          HierarchicalStack check(store);
          if (check.manifest_model() != model) {
            throw Error(ErrorCode::kWeightManifestMismatch,
                        "tensor names describe model " + check.manifest_model());
          }
        } else {
          throw Error(ErrorCode::kInvalidArgument, "unknown model '" + model + "'");
        }
        save_weights(store, path);
        std::ofstream out(manifest_path_for(path));
        out << format_manifest(model, store);
        if (!out) throw Error(ErrorCode::kIoError, "cannot write manifest");
      },
      py::arg("path"), py::arg("tensors"), py::arg("model"),
      "Write HWTS weights plus the sibling manifest after checking the layout.");
  m.def(
      "tensor_specs",
      [](const py::dict& config) {
        const nlohmann::json j = json_from_py(config);
        std::vector<TensorSpec> specs;
        const std::string model = j.at("model").get<std::string>();
        if (model == "dh") {
          DhConfig c;
          c.in_channels = j.value("in_channels", c.in_channels);
          if (j.contains("conv_widths")) c.conv_widths = j["conv_widths"].get<std::array<int, 8>>();
          c.fc_hidden = j.value("fc_hidden", c.fc_hidden);
          c.validate();
          specs = dh_tensor_specs(c);
        } else if (model == "hh") {
          HhModuleConfig c;
          if (j.contains("branch_widths")) c.branch_widths = j["branch_widths"].get<std::array<int, 4>>();
          if (j.contains("merged_widths")) c.merged_widths = j["merged_widths"].get<std::array<int, 4>>();
          c.fc_hidden = j.value("fc_hidden", c.fc_hidden);
          c.validate();
          specs = hh_tensor_specs(c, j.value("prefix", std::string()));
        } else {
          throw Error(ErrorCode::kInvalidArgument, "unknown model '" + model + "'");
        }
        py::dict out;
        for (const auto& s : specs) out[py::str(s.name)] = py::tuple(py::cast(s.shape));
        return out;
      },
      py::arg("config"), "Expected tensor names and shapes for a model configuration.");

  // models
  py::class_<DhModel>(m, "DhModel")
      .def(py::init([](const py::dict& t) { return DhModel(store_from_dict(t)); }), py::arg("tensors"))
      .def_static("load", &DhModel::load, py::arg("path"))
      .def_property_readonly("in_channels", [](const DhModel& d) { return d.config().in_channels; })
      .def(
          "forward",
          [](const DhModel& d, const FloatArray& o, const FloatArray& w) {
            return delta_to_array(d.forward(image_from_array(o), image_from_array(w)));
          },
          py::arg("original"), py::arg("warped"));

  py::class_<HierarchicalStack>(m, "HierarchicalStack")
      .def(py::init([](const py::dict& t) { return HierarchicalStack(store_from_dict(t)); }),
           py::arg("tensors"))
      .def_static("load", &HierarchicalStack::load, py::arg("path"))
      .def("__len__", &HierarchicalStack::size)
      .def(
          "module_forward",
          [](const HierarchicalStack& s, int i, const FloatArray& o, const FloatArray& w) {
            if (i < 0 || i >= s.size()) throw py::index_error("module index out of range");
            return delta_to_array(s.module_forward(i, image_from_array(o), image_from_array(w)));
          },
          py::arg("index"), py::arg("original"), py::arg("warped"))
      .def(
          "infer",
          [](const HierarchicalStack& s, const FloatArray& o, const FloatArray& w,
             const DoubleArray& corners) {
            const StackResult r = s.infer(image_from_array(o), image_from_array(w), corners_from_array(corners));
            py::dict d;
            d["delta"] = delta_to_array(r.delta);
            py::list per;
            for (const auto& x : r.per_module) per.append(delta_to_array(x));
            d["per_module"] = per;
            d["rewarp_skipped"] = r.rewarp_skipped;
            return d;
          },
          py::arg("original"), py::arg("warped"), py::arg("corners"));

  // harness
  m.def(
      "run_experiment",
      [](const py::dict& config, bool write_outputs) {
        const ExperimentConfig cfg = config_from_json(json_from_py(config));
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run_experiment(cfg);
          if (write_outputs) write_run_outputs(r, cfg.out_dir);
        }
        py::list records;
        for (const auto& rec : r.records) {
          py::dict d;
          d["sample_id"] = rec.sample_id;
          d["method"] = rec.method;
          d["corruption"] = std::string(corruption_kind_name(rec.corruption.kind));
          d["magnitude"] = rec.corruption.magnitude;
          d["ace"] = ace_to_py(rec.ace);
          records.append(d);
        }
        py::dict out;
        out["records"] = records;
        out["summary"] = summary_to_list(r.summary);
        out["manifest"] = json_to_py(r.manifest.to_json());
        return out;
      },
      py::arg("config"), py::arg("write_outputs") = false,
      "Run an experiment described by a config mapping with the CLI's JSON schema.");
  m.def(
      "report_markdown",
      [](const std::filesystem::path& summary_csv) {
        std::ifstream in(summary_csv);
        if (!in) throw Error(ErrorCode::kIoError, "cannot open " + summary_csv.string());
        return report_markdown_csv(in);
      },
      py::arg("summary_csv"));
}
