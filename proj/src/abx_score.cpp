// abx_score.cpp

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

#include "zsabx/abx_score.h"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "json.hpp"
#include "zsabx/common.h"

namespace zsabx {

double score_triplet(double d_ax, double d_bx) {
  if (!std::isfinite(d_ax) || !std::isfinite(d_bx))
    throw ContractError("score_triplet: non-finite distance");
  if (d_ax < d_bx) return 1.0;
  if (d_ax == d_bx) return 0.5;
  return 0.0;
}

CellScore score_cell(const AbxCell& cell, const std::vector<Triplet>& triplets,
                     const TokenFeatures& features, const DistanceSpec& spec) {
  if (triplets.empty())
    throw ContractError("score_cell: no triplets for " + cell.key());
  auto sequence_distance = [&](std::int32_t i, std::int32_t j) {
    const FeatureMatrix& fi = features(i);
    const FeatureMatrix& fj = features(j);
    return spec.sequence_mode == SequenceMode::kDtw
               ? dtw_distance(fi, fj, spec.frame_metric)
               : pooled_distance(fi, fj, spec.frame_metric);
  };
  // distances repeat heavily across triplets of one cell
  std::unordered_map<std::uint64_t, double> cache;
  auto cached = [&](std::int32_t i, std::int32_t j) {
    std::uint64_t key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) |
                        static_cast<std::uint32_t>(j);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    double d = sequence_distance(i, j);
    cache.emplace(key, d);
    return d;
  };
  CellScore cs;
  cs.key = cell.key();
  cs.triplet_count = triplets.size();
  for (const Triplet& t : triplets)
    cs.score_sum += score_triplet(cached(t.a, t.x), cached(t.b, t.x));
  return cs;
}

namespace {

struct MeanAcc {
  double sum = 0.0;
  std::uint64_t count = 0;
  void add(double v) { sum += v; ++count; }
  double mean() const { return sum / static_cast<double>(count); }
};

// unweighted mean per group, input iterated in ascending key order
std::map<std::string, double> collapse(
    const std::map<std::string, double>& level,
    const std::function<std::string(const std::string&)>& group_key) {
  std::map<std::string, MeanAcc> acc;
  for (const auto& [key, value] : level) acc[group_key(key)].add(value);
  std::map<std::string, double> out;
  for (const auto& [key, a] : acc) out[key] = a.mean();
  return out;
}

std::string drop_last_fields(const std::string& key, int n) {
  std::size_t pos = key.size();
  for (int i = 0; i < n; ++i) {
    pos = key.rfind(' ', pos - 1);
  }
  return key.substr(0, pos);
}

}  // namespace

AbxReport aggregate(const std::vector<AbxCell>& cells,
                    const std::vector<CellScore>& scores, AbxKind condition,
                    const DistanceSpec& spec) {
  if (cells.empty())
    throw DataError("no scorable cells");
  if (cells.size() != scores.size())
    throw ContractError("aggregate: cells/scores size mismatch");

  AbxReport report;
  report.condition = condition;
  report.frame_metric = spec.frame_metric;
  report.sequence_mode = spec.sequence_mode;
  report.cells_scored = cells.size();

  for (std::size_t i = 0; i < cells.size(); ++i) {
    report.level_cell[scores[i].key] = scores[i].score();
    report.triplets_scored += scores[i].triplet_count;
  }

  if (condition == AbxKind::kLanguage) {
    // symmetrize ordered language pairs, then unweighted mean
    std::map<std::string, MeanAcc> pairs;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto& c = cells[i];
      std::string unordered = c.lang_a < c.lang_b
                                  ? c.lang_a + " " + c.lang_b
                                  : c.lang_b + " " + c.lang_a;
      pairs[unordered].add(scores[i].score());
    }
    MeanAcc final_acc;
    for (const auto& [key, a] : pairs) {
      report.level_pair[key] = a.mean();
      final_acc.add(a.mean());
    }
    report.final_score = final_acc.mean();
  } else {
    // cell keys: "<cond> pA pB prev next spk" (within)
    //            "<cond> pA pB prev next s1 s2" (across)
    int speaker_fields = condition == AbxKind::kPhoneticWithin ? 1 : 2;
    // mean over speakers (or speaker pairs) per (pA, pB, context)
    report.level_speaker = collapse(
        report.level_cell, [&](const std::string& k) {
          return drop_last_fields(k, speaker_fields);
        });
    // mean over contexts per ordered (pA, pB)
    report.level_context = collapse(
        report.level_speaker,
        [](const std::string& k) { return drop_last_fields(k, 2); });
    // symmetrize ordered pairs
    std::map<std::string, MeanAcc> pairs;
    for (const auto& [key, value] : report.level_context) {
      // key: "<cond> pA pB"
      std::size_t sp1 = key.find(' ');
      std::size_t sp2 = key.find(' ', sp1 + 1);
      std::string pa = key.substr(sp1 + 1, sp2 - sp1 - 1);
      std::string pb = key.substr(sp2 + 1);
      std::string unordered = pa < pb ? pa + " " + pb : pb + " " + pa;
      pairs[unordered].add(value);
    }
    MeanAcc final_acc;
    for (const auto& [key, a] : pairs) {
      report.level_pair[key] = a.mean();
      final_acc.add(a.mean());
    }
    report.final_score = final_acc.mean();
  }

  report.final_error_percent = 100.0 * (1.0 - report.final_score);
  return report;
}

std::string AbxReport::to_json() const {
  nlohmann::json levels;
  levels["cell"] = level_cell;
  if (!level_speaker.empty()) levels["speaker"] = level_speaker;
  if (!level_context.empty()) levels["context"] = level_context;
  levels["pair"] = level_pair;
  nlohmann::json j{
      {"condition", zsabx::to_string(condition)},
      {"frame_metric", zsabx::to_string(frame_metric)},
      {"sequence_mode", zsabx::to_string(sequence_mode)},
      {"final_score", final_score},
      {"final_error_percent", final_error_percent},
      {"final_error_percent_printed", format_percent2(final_error_percent)},
      {"cells_scored", cells_scored},
      {"cells_skipped", cells_skipped},
      {"triplets_scored", triplets_scored},
      {"sampled", sampled},
      {"levels", levels},
  };
  if (sampled) {
    j["max_triplets"] = max_triplets;
    j["sample_seed"] = sample_seed;
  }
  return j.dump(2) + "\n";
}

std::string AbxReport::cell_csv() const {
  std::string out = "cell,score\n";
  for (const auto& [key, value] : level_cell) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    out += "\"" + key + "\"," + buf + "\n";
  }
  return out;
}

AbxReport run_abx_cells(const std::vector<AbxCell>& cells,
                        std::uint64_t candidates_skipped,
                        const std::vector<FeatureMatrix>& token_features,
                        AbxKind condition, const DistanceSpec& spec,
                        const RunOptions& options) {
  if (cells.empty()) throw DataError("no scorable cells");
  TokenFeatures features = [&](std::int32_t i) -> const FeatureMatrix& {
    return token_features.at(static_cast<std::size_t>(i));
  };
  std::vector<CellScore> scores(cells.size());
  int threads = options.threads > 0
                    ? options.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        auto triplets = options.max_triplets > 0
                            ? sample_triplets(cells[i], options.max_triplets,
                                              options.seed)
                            : enumerate_triplets(cells[i]);
        scores[i] = score_cell(cells[i], triplets, features, spec);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(cells.size());
        return;
      }
    }
  };
  if (threads == 1 || cells.size() == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  AbxReport report = aggregate(cells, scores, condition, spec);
  report.cells_skipped = candidates_skipped;
  if (options.max_triplets > 0) {
    report.max_triplets = options.max_triplets;
    report.sample_seed = options.seed;
    std::uint64_t full = 0;
    for (const auto& c : cells) full += c.triplet_count();
    report.sampled = report.triplets_scored < full;
  }
  return report;
}

namespace {

// slice every token out of its utterance, loading each utterance once
std::vector<FeatureMatrix> materialize_phone_tokens(
    const ArchiveReader& archive, const std::vector<PhoneToken>& tokens) {
  std::map<std::string, std::vector<std::size_t>> by_utt;
  for (std::size_t i = 0; i < tokens.size(); ++i)
    by_utt[tokens[i].utterance_id].push_back(i);
  std::vector<FeatureMatrix> out(tokens.size());
  for (const auto& [utt, idxs] : by_utt) {
    if (!archive.contains(utt))
      throw DataError("token references utterance missing from archive: " + utt);
    FeatureMatrix m = archive.load(utt);
    for (std::size_t i : idxs) {
      try {
        out[i] = slice(m, tokens[i].onset, tokens[i].offset);
      } catch (const DataError& e) {
        throw DataError("token " + std::to_string(i) + " (" + utt + " " +
                        tokens[i].phone + "): " + e.what());
      }
    }
  }
  return out;
}

}  // namespace

AbxReport run_phonetic_abx(const ArchiveReader& archive,
                           const std::vector<PhoneToken>& tokens,
                           const AbxCondition& condition,
                           const DistanceSpec& spec,
                           const RunOptions& options) {
  CellSet set = build_phonetic_cells(tokens, condition);
  auto features = materialize_phone_tokens(archive, tokens);
  return run_abx_cells(set.cells, set.candidates_skipped, features,
                       condition.kind, spec, options);
}

AbxReport run_language_abx(const ArchiveReader& archive,
                           const std::vector<UtteranceRecord>& records,
                           const DistanceSpec& spec,
                           const RunOptions& options) {
  AbxCondition condition;
  condition.kind = AbxKind::kLanguage;
  CellSet set = build_language_cells(records, condition);
  std::vector<FeatureMatrix> features(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!archive.contains(records[i].utterance_id))
      throw DataError("record references utterance missing from archive: " +
                      records[i].utterance_id);
    features[i] = archive.load(records[i].utterance_id);
  }
  DistanceSpec pooled = spec;
  pooled.sequence_mode = SequenceMode::kMeanPool;
  return run_abx_cells(set.cells, set.candidates_skipped, features,
                       AbxKind::kLanguage, pooled, options);
}

}  // namespace zsabx
