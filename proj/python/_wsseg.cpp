/* Copyright 2026 The wsseg Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Python bindings. Images are (H, W, 3) float arrays in [0, 1], label maps
// are (H, W) int arrays with -1 for unknown, probability grids are
// (H, W, C) and affinity fields are (12, H, W).

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <memory>
#include <string>

#include "wsseg/config.hpp"
#include "wsseg/em.hpp"
#include "wsseg/energy.hpp"
#include "wsseg/error.hpp"
#include "wsseg/propagation.hpp"
#include "wsseg/report.hpp"
#include "wsseg/superpixel.hpp"

namespace py = pybind11;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using IntArray = py::array_t<int, py::array::c_style | py::array::forcecast>;

wsseg::RgbImage to_image(const Array& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) throw py::value_error("image must have shape (H, W, 3)");
  wsseg::RgbImage img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  std::copy(a.data(), a.data() + a.size(), img.data.begin());
  return img;
}

Array from_image(const wsseg::RgbImage& img) {
  Array out({img.height, img.width, 3});
  std::copy(img.data.begin(), img.data.end(), out.mutable_data());
  return out;
}

IntArray from_labels(const wsseg::LabelGrid& g) {
  IntArray out({g.height(), g.width()});
  int* p = out.mutable_data();
  for (std::size_t i = 0; i < g.size(); ++i) p[i] = g.is_unknown(i) ? -1 : static_cast<int>(g[i]);
  return out;
}

wsseg::ProbGrid to_probs(const Array& a) {
  if (a.ndim() != 3) throw py::value_error("probabilities must have shape (H, W, C)");
  wsseg::ProbGrid g(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)),
                    static_cast<int>(a.shape(2)));
  std::copy(a.data(), a.data() + a.size(), g.data().begin());
  return g;
}

Array from_probs(const wsseg::ProbGrid& g) {
  Array out({g.height(), g.width(), g.num_classes()});
  std::copy(g.data().begin(), g.data().end(), out.mutable_data());
  return out;
}

wsseg::AffinityField to_gates(const Array& a) {
  if (a.ndim() != 3 || a.shape(0) != wsseg::kGateFields) {
    throw py::value_error("gates must have shape (12, H, W)");
  }
  wsseg::AffinityField f(static_cast<int>(a.shape(2)), static_cast<int>(a.shape(1)));
  const std::size_t n = f.pixel_count();
  for (int k = 0; k < wsseg::kGateFields; ++k) {
    std::copy(a.data() + k * n, a.data() + (k + 1) * n, f.gates[static_cast<std::size_t>(k)].begin());
  }
  return f;
}

Array from_gates(const wsseg::AffinityField& f) {
  Array out({wsseg::kGateFields, f.height, f.width});
  const std::size_t n = f.pixel_count();
  for (int k = 0; k < wsseg::kGateFields; ++k) {
    const auto& src = f.gates[static_cast<std::size_t>(k)];
    std::copy(src.begin(), src.end(), out.mutable_data() + k * n);
  }
  return out;
}

wsseg::CliConfig config_from(const std::map<std::string, std::string>& overrides) {
  wsseg::KeyValues kv(overrides.begin(), overrides.end());
  return wsseg::parse_config("", kv);
}

py::list corpus_items(const wsseg::Corpus& corpus) {
  py::list items;
  for (const auto& item : corpus.items) {
    py::dict d;
    d["name"] = item.name;
    d["image"] = from_image(item.image);
    d["gt"] = from_labels(item.gt);
    d["seeds"] = from_labels(item.seeds);
    items.append(d);
  }
  return items;
}

// Keeps the corpus alive next to the final state so inference and metrics
// stay available after run() returns.
struct RunResult {
  std::shared_ptr<wsseg::Corpus> corpus;
  wsseg::EmState state;
  bool pairwise = true;
};

}  // namespace

PYBIND11_MODULE(_wsseg, m) {
  m.doc() = "Weakly supervised segmentation with learned affinity propagation";

  // Translators registered later are tried first, so the base class goes first.
  py::register_exception<wsseg::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<wsseg::DivergenceError>(m, "DivergenceError", PyExc_ArithmeticError);
  py::register_exception<wsseg::ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("default_config", [] {
    std::map<std::string, std::string> out;
    for (const auto& k : wsseg::config_keys()) out[k.name] = k.default_value;
    return out;
  }, "Every configuration key with its default value.");

  m.def("make_corpus", [](const std::map<std::string, std::string>& overrides) {
    const auto cfg = config_from(overrides);
    return corpus_items(wsseg::make_corpus(cfg.scene, cfg.seeds, cfg.images));
  }, py::arg("overrides") = std::map<std::string, std::string>{},
     "Synthetic corpus as a list of dicts with name, image, gt and seeds.");

  m.def("segment", [](const Array& image, double scale, int min_size) {
    const auto sp = wsseg::segment(to_image(image), scale, min_size);
    IntArray out({sp.height, sp.width});
    std::copy(sp.region_id.begin(), sp.region_id.end(), out.mutable_data());
    return out;
  }, py::arg("image"), py::arg("scale") = 100.0, py::arg("min_size") = 16,
     "Graph-based superpixels; returns region ids numbered by first appearance.");

  m.def("propagate", [](const Array& gates, const Array& probs) {
    return from_probs(wsseg::propagate(to_gates(gates), to_probs(probs)));
  }, py::arg("gates"), py::arg("probs"), "Four-direction gated propagation, renormalized.");

  m.def("laplacian_energy", [](const Array& gates, const Array& probs) {
    return wsseg::laplacian_quadratic(wsseg::graph_from_gates(to_gates(gates)), to_probs(probs));
  }, py::arg("gates"), py::arg("probs"), "Quadratic form of the graph Laplacian built from gates.");

  py::class_<RunResult>(m, "RunResult")
      .def_property_readonly("steps", [](const RunResult& r) { return r.state.step; })
      .def_property_readonly("records", [](const RunResult& r) {
        py::list rows;
        for (const auto& rec : r.state.records) {
          rows.append(py::make_tuple(rec.step, rec.stage, rec.metrics.mean_iou,
                                     rec.metrics.precision, rec.metrics.energy));
        }
        return rows;
      }, "(step, stage, mean_iou, precision, energy) tuples in order.")
      .def_property_readonly("inequality_fraction",
                             [](const RunResult& r) { return r.state.inequality_fraction; })
      .def_property_readonly("metrics_csv",
                             [](const RunResult& r) { return wsseg::metrics_csv(r.state); })
      .def_property_readonly("unary_params", [](const RunResult& r) {
        return wsseg::to_named_values(r.state.unary);
      })
      .def_property_readonly("pairwise_params", [](const RunResult& r) {
        return wsseg::to_named_values(r.state.pairwise);
      })
      .def("mined", [](const RunResult& r, std::size_t i) {
        return from_labels(r.state.mined.at(i));
      }, py::arg("index"), "Mined label map of image `index` at the last step.")
      .def("gates", [](const RunResult& r, const Array& image) {
        return from_gates(wsseg::compute_gates(r.state.pairwise,
                                               wsseg::extract_features(to_image(image))));
      }, py::arg("image"), "Affinity field of the trained pairwise network.")
      .def("infer", [](const RunResult& r, const Array& image) {
        const wsseg::PairwiseParams* pw = r.pairwise ? &r.state.pairwise : nullptr;
        return from_probs(wsseg::EmDriver::infer(r.state.unary, pw, to_image(image)));
      }, py::arg("image"), "Class probabilities for a new image.");

  m.def("run", [](const std::map<std::string, std::string>& overrides) {
    const auto cfg = config_from(overrides);
    RunResult r;
    r.corpus = std::make_shared<wsseg::Corpus>(wsseg::make_corpus(cfg.scene, cfg.seeds, cfg.images));
    r.pairwise = cfg.run.pairwise;
    {
      py::gil_scoped_release release;
      wsseg::EmDriver driver(*r.corpus, cfg.run);
      r.state = driver.run();
    }
    return r;
  }, py::arg("overrides") = std::map<std::string, std::string>{},
     "Generates the corpus described by the overrides and runs EM on it.");
}
