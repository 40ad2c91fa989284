// zsabx_main.cpp
//
// Single executable exposing every pipeline stage as a subcommand.
// Machine-readable content goes to stdout / --out files; human-oriented
// text goes to stderr. Exit codes: 0 success, 1 usage error, 2 data
// error, 3 internal invariant failure.

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

#include <cmath>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "zsabx/abx_score.h"
#include "zsabx/common.h"
#include "zsabx/gap_analysis.h"
#include "zsabx/losses.h"
#include "zsabx/quantize.h"
#include "zsabx/syngen.h"

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr const char* kFormatVersions = "feature-file FEA1 v1, codebook KMB1 v1";

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw zsabx::DataError("cannot open output file: " + path);
  out << content;
  if (!out) throw zsabx::DataError("write failed: " + path);
}

std::vector<zsabx::PhoneToken> load_phone_items(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw zsabx::DataError("cannot open item file: " + path);
  return zsabx::parse_phone_items(in);
}

std::vector<zsabx::UtteranceRecord> load_language_items(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw zsabx::DataError("cannot open item file: " + path);
  return zsabx::parse_language_items(in);
}

int cmd_abx_phonetic(const std::string& features, const std::string& items,
                     const std::string& mode, const std::string& metric,
                     const std::string& out, const std::string& cell_dump,
                     std::uint64_t max_triplets, std::uint64_t seed,
                     int threads) {
  zsabx::AbxCondition condition;
  if (mode == "within")
    condition.kind = zsabx::AbxKind::kPhoneticWithin;
  else if (mode == "across")
    condition.kind = zsabx::AbxKind::kPhoneticAcross;
  else
    throw zsabx::DataError("unknown mode: " + mode);
  zsabx::DistanceSpec spec;
  spec.frame_metric = zsabx::frame_metric_from_string(metric);
  spec.sequence_mode = zsabx::SequenceMode::kDtw;
  zsabx::RunOptions options;
  options.threads = threads;
  options.max_triplets = max_triplets;
  options.seed = seed;

  zsabx::ArchiveReader archive(features);
  auto tokens = load_phone_items(items);
  if (!cell_dump.empty()) {
    auto set = zsabx::build_phonetic_cells(tokens, condition);
    std::ofstream dump(cell_dump, std::ios::trunc);
    if (!dump) throw zsabx::DataError("cannot open cell dump file: " + cell_dump);
    zsabx::dump_cells(set.cells, dump);
  }
  auto report = zsabx::run_phonetic_abx(archive, tokens, condition, spec, options);
  write_file(out, report.to_json());
  std::cerr << "abx phonetic (" << mode << "): error "
            << zsabx::format_percent2(report.final_error_percent) << "% over "
            << report.cells_scored << " cells, " << report.triplets_scored
            << " triplets\n";
  return 0;
}

int cmd_abx_language(const std::string& features, const std::string& items,
                     const std::string& metric, const std::string& out,
                     int threads) {
  zsabx::DistanceSpec spec;
  spec.frame_metric = zsabx::frame_metric_from_string(metric);
  spec.sequence_mode = zsabx::SequenceMode::kMeanPool;
  zsabx::RunOptions options;
  options.threads = threads;
  zsabx::ArchiveReader archive(features);
  auto records = load_language_items(items);
  auto report = zsabx::run_language_abx(archive, records, spec, options);
  write_file(out, report.to_json());
  std::cerr << "abx language: error "
            << zsabx::format_percent2(report.final_error_percent) << "% over "
            << report.cells_scored << " cells\n";
  return 0;
}

int cmd_quantize_fit(const std::string& features, std::size_t k,
                     std::uint64_t sample_size, std::uint64_t seed,
                     std::size_t max_iter, double tol,
                     const std::string& out) {
  zsabx::ArchiveReader archive(features);
  std::size_t dim = archive.dim();
  if (dim == 0) throw zsabx::DataError("empty archive");

  // seeded uniform reservoir over all frames, manifest order
  zsabx::Rng rng(seed);
  std::vector<double> sample;
  sample.reserve(std::min<std::uint64_t>(sample_size, 1 << 20) * dim);
  std::uint64_t seen = 0;
  for (const auto& id : archive.utterance_ids()) {
    zsabx::FeatureMatrix m = archive.load(id);
    for (std::size_t f = 0; f < m.frames; ++f) {
      if (seen < sample_size) {
        sample.insert(sample.end(), m.row(f), m.row(f) + dim);
      } else {
        std::uint64_t j = rng.next_below(seen + 1);
        if (j < sample_size)
          std::copy(m.row(f), m.row(f) + dim, sample.begin() + j * dim);
      }
      ++seen;
    }
  }
  std::size_t n = sample.size() / dim;
  if (n < k)
    throw zsabx::DataError("sample < k (" + std::to_string(n) + " frames < " +
                           std::to_string(k) + ")");
  auto cb = zsabx::fit_kmeans(sample, n, dim, k, max_iter, tol,
                              static_cast<std::int64_t>(seed));
  zsabx::save_codebook(out, cb);
  std::cerr << "quantize fit: k=" << k << " dim=" << dim << " frames=" << n
            << " iters=" << cb.iterations_run << " inertia=" << cb.inertia
            << "\n";
  return 0;
}

int cmd_quantize_apply(const std::string& features, const std::string& codebook,
                       const std::string& encoding, const std::string& out) {
  zsabx::ArchiveReader archive(features);
  zsabx::Codebook cb = zsabx::load_codebook(codebook);
  zsabx::UnitEncoding enc;
  if (encoding == "one_hot")
    enc = zsabx::UnitEncoding::kOneHot;
  else if (encoding == "centroid")
    enc = zsabx::UnitEncoding::kCentroid;
  else
    throw zsabx::DataError("unknown encoding: " + encoding);

  std::vector<zsabx::FeatureMatrix> encoded;
  std::string units_text;
  for (const auto& id : archive.utterance_ids()) {
    zsabx::FeatureMatrix m = archive.load(id);
    auto units = zsabx::assign_units(m, cb);
    units_text += zsabx::format_unit_sequence(units);
    units_text += '\n';
    encoded.push_back(zsabx::units_to_features(units, cb, enc, m.frame_rate));
  }
  zsabx::write_archive(encoded, out);
  write_file((std::filesystem::path(out) / "units.txt").string(), units_text);
  std::cerr << "quantize apply: " << encoded.size() << " utterances encoded ("
            << encoding << ")\n";
  return 0;
}

int cmd_loss_check(std::uint64_t trials, std::uint64_t seed) {
  zsabx::Rng rng(seed);
  const double temperatures[] = {0.05, 0.07, 1.0};
  double max_rel = 0.0;
  const double h = 1e-5;
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    std::size_t n = 1 + rng.next_below(8);
    std::size_t d = 2 + rng.next_below(15);
    zsabx::BatchPair batch;
    batch.n = n;
    batch.d = d;
    batch.audio.resize(n * d);
    batch.image.resize(n * d);
    for (auto& v : batch.audio) v = rng.next_gaussian();
    for (auto& v : batch.image) v = rng.next_gaussian();
    double t = temperatures[trial % 3];
    auto grad = zsabx::grad_contrastive_av(batch, t);
    auto check = [&](std::vector<double>& param, const std::vector<double>& g) {
      for (std::size_t i = 0; i < param.size(); ++i) {
        double save = param[i];
        param[i] = save + h;
        double up = zsabx::contrastive_av(batch, t);
        param[i] = save - h;
        double down = zsabx::contrastive_av(batch, t);
        param[i] = save;
        double fd = (up - down) / (2.0 * h);
        double rel = std::abs(g[i] - fd) / std::max(1.0, std::abs(g[i]) + std::abs(fd));
        max_rel = std::max(max_rel, rel);
      }
    };
    check(batch.audio, grad.d_audio);
    check(batch.image, grad.d_image);
  }
  std::cout << "max_relative_error " << max_rel << "\n";
  std::cerr << "loss check: " << trials << " trials, max relative error "
            << max_rel << (max_rel <= 1e-4 ? " (ok)" : " (FAIL)") << "\n";
  return max_rel <= 1e-4 ? 0 : 3;
}

int cmd_gaps(const std::string& results, const std::string& out) {
  std::vector<zsabx::ResultRow> rows;
  if (results.size() >= 5 && results.substr(results.size() - 5) == ".json") {
    rows = zsabx::parse_results_json(results);
  } else {
    std::ifstream in(results);
    if (!in) throw zsabx::DataError("cannot open results file: " + results);
    rows = zsabx::parse_results_csv(in);
  }
  auto report = zsabx::analyze(rows);
  write_file(out, report.to_json());
  std::cerr << report.to_table();
  return 0;
}

int cmd_syngen(const std::string& spec_path, const std::string& out_dir) {
  auto spec = zsabx::SynSpec::from_json_file(spec_path);
  zsabx::generate_to_dir(spec, out_dir);
  std::cerr << "syngen: wrote fixture to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zero-shot speech representation evaluation engine"};
  app.require_subcommand(0, 1);
  bool version = false;
  app.add_flag("--version", version, "print version and format versions");

  // abx
  auto* abx = app.add_subcommand("abx", "ABX discrimination scoring");
  abx->require_subcommand(1);
  std::string features, items, out, mode = "within", metric = "cosine";
  std::string cell_dump;
  std::uint64_t max_triplets = 0, seed = 0;
  int threads = 0;
  auto* phonetic = abx->add_subcommand("phonetic", "phoneme discrimination");
  phonetic->add_option("--features", features)->required();
  phonetic->add_option("--items", items)->required();
  phonetic->add_option("--mode", mode, "within|across");
  phonetic->add_option("--frame-metric", metric, "cosine|angular");
  phonetic->add_option("--out", out)->required();
  phonetic->add_option("--max-triplets", max_triplets);
  phonetic->add_option("--seed", seed);
  phonetic->add_option("--threads", threads);
  phonetic->add_option("--dump-cells", cell_dump, "audit cell listing file");
  auto* language = abx->add_subcommand("language", "language discrimination");
  language->add_option("--features", features)->required();
  language->add_option("--items", items)->required();
  language->add_option("--frame-metric", metric, "cosine|angular");
  language->add_option("--out", out)->required();
  language->add_option("--threads", threads);

  // quantize
  auto* quantize = app.add_subcommand("quantize", "k-means units");
  quantize->require_subcommand(1);
  std::size_t k = 50, max_iter = 300;
  std::uint64_t sample_size = 1000000;
  double tol = 1e-6;
  std::string codebook, encoding = "one_hot";
  auto* fit = quantize->add_subcommand("fit", "train a codebook");
  fit->add_option("--features", features)->required();
  fit->add_option("--k", k);
  fit->add_option("--sample", sample_size);
  fit->add_option("--seed", seed);
  fit->add_option("--max-iter", max_iter);
  fit->add_option("--tol", tol);
  fit->add_option("--out", out)->required();
  auto* apply = quantize->add_subcommand("apply", "encode an archive");
  apply->add_option("--features", features)->required();
  apply->add_option("--codebook", codebook)->required();
  apply->add_option("--encoding", encoding, "one_hot|centroid");
  apply->add_option("--out", out)->required();

  // loss
  auto* loss = app.add_subcommand("loss", "loss self-checks");
  loss->require_subcommand(1);
  std::uint64_t trials = 100;
  auto* check = loss->add_subcommand("check", "analytic vs finite-difference gradients");
  check->add_option("--trials", trials);
  check->add_option("--seed", seed);

  // gaps
  auto* gaps = app.add_subcommand("gaps", "multilingual gap/gain analysis");
  std::string results;
  gaps->add_option("--results", results)->required();
  gaps->add_option("--out", out)->required();

  // syngen
  auto* syngen = app.add_subcommand("syngen", "synthetic fixture generator");
  std::string spec_path;
  syngen->add_option("--spec", spec_path)->required();
  syngen->add_option("--out", out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e, std::cout, std::cerr);
    return rc == 0 ? 0 : 1;  // usage errors are exit code 1
  }

  try {
    if (version) {
      std::cout << "zsabx " << kVersion << " (" << kFormatVersions << ")\n";
      return 0;
    }
    if (phonetic->parsed())
      return cmd_abx_phonetic(features, items, mode, metric, out, cell_dump,
                              max_triplets, seed, threads);
    if (language->parsed())
      return cmd_abx_language(features, items, metric, out, threads);
    if (fit->parsed())
      return cmd_quantize_fit(features, k, sample_size, seed, max_iter, tol, out);
    if (apply->parsed())
      return cmd_quantize_apply(features, codebook, encoding, out);
    if (check->parsed()) return cmd_loss_check(trials, seed);
    if (gaps->parsed()) return cmd_gaps(results, out);
    if (syngen->parsed()) return cmd_syngen(spec_path, out);
    std::cerr << app.help();
    return 1;
  } catch (const zsabx::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
