// bindings.cpp
//
// pybind11 surface over the evaluation engine. Matrices cross the boundary
// as nested lists (frames x dim); reports come back as JSON strings so the
// python side stays schema-identical with the CLI output.

// Copyright 2026  The zsabx authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>

#include "zsabx/abx_score.h"
#include "zsabx/gap_analysis.h"
#include "zsabx/losses.h"
#include "zsabx/quantize.h"
#include "zsabx/syngen.h"

namespace py = pybind11;
using namespace zsabx;

namespace {

FeatureMatrix to_matrix(const std::vector<std::vector<double>>& rows,
                        double frame_rate) {
  FeatureMatrix m;
  m.utterance_id = "py";
  m.frames = rows.size();
  m.dim = rows.empty() ? 0 : rows[0].size();
  m.frame_rate = frame_rate;
  for (const auto& r : rows) {
    if (r.size() != m.dim) throw DataError("ragged matrix rows");
    m.data.insert(m.data.end(), r.begin(), r.end());
  }
  return m;
}

std::string abx_phonetic(const std::string& features_dir,
                         const std::string& items_path,
                         const std::string& mode, const std::string& metric,
                         std::uint64_t max_triplets, std::uint64_t seed,
                         int threads) {
  AbxCondition condition;
  if (mode == "within")
    condition.kind = AbxKind::kPhoneticWithin;
  else if (mode == "across")
    condition.kind = AbxKind::kPhoneticAcross;
  else
    throw DataError("unknown mode: " + mode);
  DistanceSpec spec;
  spec.frame_metric = frame_metric_from_string(metric);
  spec.sequence_mode = SequenceMode::kDtw;
  RunOptions options;
  options.threads = threads;
  options.max_triplets = max_triplets;
  options.seed = seed;
  ArchiveReader archive(features_dir);
  std::ifstream in(items_path);
  if (!in) throw DataError("cannot open item file: " + items_path);
  auto tokens = parse_phone_items(in);
  return run_phonetic_abx(archive, tokens, condition, spec, options).to_json();
}

std::string abx_language(const std::string& features_dir,
                         const std::string& items_path,
                         const std::string& metric, int threads) {
  DistanceSpec spec;
  spec.frame_metric = frame_metric_from_string(metric);
  spec.sequence_mode = SequenceMode::kMeanPool;
  RunOptions options;
  options.threads = threads;
  ArchiveReader archive(features_dir);
  std::ifstream in(items_path);
  if (!in) throw DataError("cannot open item file: " + items_path);
  auto records = parse_language_items(in);
  return run_language_abx(archive, records, spec, options).to_json();
}

std::string analyze_rows(
    const std::vector<std::tuple<std::string, std::string, double, double>>&
        rows) {
  std::vector<ResultRow> parsed;
  for (const auto& [stage, setting, ws, as_] : rows) {
    ResultRow r;
    r.stage = stage_from_string(stage);
    r.setting = setting_from_string(setting);
    r.ws_error = ws;
    r.as_error = as_;
    parsed.push_back(r);
  }
  return analyze(parsed).to_json();
}

}  // namespace

PYBIND11_MODULE(_zsabx, m) {
  m.doc() = "zero-shot speech representation evaluation engine";

  py::register_exception<DataError>(m, "DataError");
  py::register_exception<ContractError>(m, "ContractError");

  m.def("frame_distance",
        [](const std::vector<double>& u, const std::vector<double>& v,
           const std::string& metric) {
          return frame_distance(u, v, frame_metric_from_string(metric));
        },
        py::arg("u"), py::arg("v"), py::arg("metric") = "cosine");

  m.def("dtw_distance",
        [](const std::vector<std::vector<double>>& x,
           const std::vector<std::vector<double>>& y,
           const std::string& metric) {
          return dtw_distance(to_matrix(x, 100.0), to_matrix(y, 100.0),
                              frame_metric_from_string(metric));
        },
        py::arg("x"), py::arg("y"), py::arg("metric") = "cosine");

  m.def("abx_phonetic", &abx_phonetic, py::arg("features_dir"),
        py::arg("items_path"), py::arg("mode") = "within",
        py::arg("metric") = "cosine", py::arg("max_triplets") = 0,
        py::arg("seed") = 0, py::arg("threads") = 0,
        "Run phonetic ABX; returns the report as a JSON string.");

  m.def("abx_language", &abx_language, py::arg("features_dir"),
        py::arg("items_path"), py::arg("metric") = "cosine",
        py::arg("threads") = 0,
        "Run language ABX; returns the report as a JSON string.");

  m.def("fit_kmeans",
        [](const std::vector<std::vector<double>>& points, std::size_t k,
           std::size_t max_iter, double tol, std::int64_t seed) {
          auto m_ = to_matrix(points, 100.0);
          auto cb = fit_kmeans(m_.data, m_.frames, m_.dim, k, max_iter, tol,
                               seed);
          py::dict out;
          std::vector<std::vector<double>> centroids(cb.k);
          for (std::size_t j = 0; j < cb.k; ++j)
            centroids[j].assign(cb.centroid(j), cb.centroid(j) + cb.dim);
          out["centroids"] = centroids;
          out["inertia"] = cb.inertia;
          out["iterations"] = cb.iterations_run;
          out["inertia_trace"] = cb.inertia_trace;
          return out;
        },
        py::arg("points"), py::arg("k"), py::arg("max_iter") = 300,
        py::arg("tol") = 1e-6, py::arg("seed") = 0);

  m.def("assign_units",
        [](const std::vector<std::vector<double>>& frames,
           const std::vector<std::vector<double>>& centroids) {
          Codebook cb;
          cb.k = centroids.size();
          cb.dim = centroids.empty() ? 0 : centroids[0].size();
          for (const auto& c : centroids)
            cb.centroids.insert(cb.centroids.end(), c.begin(), c.end());
          return assign_units(to_matrix(frames, 100.0), cb).units;
        },
        py::arg("frames"), py::arg("centroids"));

  m.def("masked_ce",
        [](const std::vector<std::vector<double>>& logits,
           const std::vector<std::int32_t>& labels,
           const std::vector<bool>& mask) {
          auto m_ = to_matrix(logits, 100.0);
          return masked_ce(m_.data, m_.frames, m_.dim, labels, mask);
        },
        py::arg("logits"), py::arg("labels"), py::arg("mask"));

  m.def("contrastive_av",
        [](const std::vector<std::vector<double>>& audio,
           const std::vector<std::vector<double>>& image, double temperature) {
          auto a = to_matrix(audio, 100.0);
          auto v = to_matrix(image, 100.0);
          BatchPair b{a.frames, a.dim, a.data, v.data};
          return contrastive_av(b, temperature);
        },
        py::arg("audio"), py::arg("image"), py::arg("temperature") = 0.07);

  m.def("combined_loss", &combined_loss, py::arg("l_a"), py::arg("l_av"),
        py::arg("alpha") = 0.5);

  m.def("grad_contrastive_av",
        [](const std::vector<std::vector<double>>& audio,
           const std::vector<std::vector<double>>& image, double temperature) {
          auto a = to_matrix(audio, 100.0);
          auto v = to_matrix(image, 100.0);
          BatchPair b{a.frames, a.dim, a.data, v.data};
          auto g = grad_contrastive_av(b, temperature);
          return py::make_tuple(g.d_audio, g.d_image);
        },
        py::arg("audio"), py::arg("image"), py::arg("temperature") = 0.07);

  m.def("relative_gap", &relative_gap, py::arg("mono"), py::arg("bili"));
  m.def("relative_gain", &relative_gain, py::arg("baseline"),
        py::arg("grounded"));
  m.def("analyze", &analyze_rows, py::arg("rows"),
        "rows: list of (stage, setting, ws, as) tuples; returns JSON.");

  m.def("generate_fixture",
        [](const std::string& spec_json_path, const std::string& out_dir) {
          generate_to_dir(SynSpec::from_json_file(spec_json_path), out_dir);
        },
        py::arg("spec_json_path"), py::arg("out_dir"));
}
