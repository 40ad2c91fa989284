// zsabx/abx_score.h
//
// Triplet scoring, cell scoring, and hierarchical aggregation into final
// ABX error rates. Cell scoring parallelizes freely; aggregation is a
// deterministic fold over sorted keys so reports never depend on thread
// count or completion order.

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

#ifndef ZSABX_ABX_SCORE_H_
#define ZSABX_ABX_SCORE_H_

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "zsabx/abx_task.h"
#include "zsabx/featstore.h"
#include "zsabx/kernels.h"

namespace zsabx {

// 1 if d(A,X) < d(B,X), 0.5 on an exact tie, else 0.
double score_triplet(double d_ax, double d_bx);

struct CellScore {
  std::string key;
  std::uint64_t triplet_count = 0;
  double score_sum = 0.0;  // exact: triplet outcomes are multiples of 0.5
  double score() const { return score_sum / static_cast<double>(triplet_count); }
};

struct AbxReport {
  AbxKind condition = AbxKind::kPhoneticWithin;
  FrameMetric frame_metric = FrameMetric::kCosine;
  SequenceMode sequence_mode = SequenceMode::kDtw;
  double final_score = 0.0;
  double final_error_percent = 0.0;
  std::uint64_t cells_scored = 0;
  std::uint64_t cells_skipped = 0;
  std::uint64_t triplets_scored = 0;
  bool sampled = false;
  std::uint64_t max_triplets = 0;
  std::uint64_t sample_seed = 0;
  // aggregation levels, innermost first; keys are cell/group keys
  std::map<std::string, double> level_cell;
  std::map<std::string, double> level_speaker;    // phonetic: per (pA,pB,ctx)
  std::map<std::string, double> level_context;    // phonetic: per ordered (pA,pB)
  std::map<std::string, double> level_pair;       // symmetrized unordered pair

  std::string to_json() const;      // machine-readable report
  std::string cell_csv() const;     // per-cell dump: key,score
};

// Resolves a token index to its (sliced) feature sequence.
using TokenFeatures = std::function<const FeatureMatrix&(std::int32_t)>;

// Mean of score_triplet over the given triplets, with dtw_distance
// (phonetic) or pooled_distance (language) per spec.sequence_mode.
// Distances are cached per (token, token) pair inside the cell.
CellScore score_cell(const AbxCell& cell, const std::vector<Triplet>& triplets,
                     const TokenFeatures& features, const DistanceSpec& spec);

// Hierarchical aggregation, all levels unweighted means over ascending
// key order:
//   phonetic within:  speakers -> contexts -> symmetrized pair -> final
//   phonetic across:  speaker pairs -> contexts -> symmetrized pair -> final
//   language:         symmetrized ordered language pairs -> final
AbxReport aggregate(const std::vector<AbxCell>& cells,
                    const std::vector<CellScore>& scores, AbxKind condition,
                    const DistanceSpec& spec);

struct RunOptions {
  int threads = 0;               // 0 = hardware concurrency
  std::uint64_t max_triplets = 0;  // 0 = no downsampling
  std::uint64_t seed = 0;
};

AbxReport run_phonetic_abx(const ArchiveReader& archive,
                           const std::vector<PhoneToken>& tokens,
                           const AbxCondition& condition,
                           const DistanceSpec& spec,
                           const RunOptions& options = {});

AbxReport run_language_abx(const ArchiveReader& archive,
                           const std::vector<UtteranceRecord>& records,
                           const DistanceSpec& spec,
                           const RunOptions& options = {});

// Scores a prepared cell list against materialized per-token features.
// This is the engine core shared by both runners and the test oracles.
AbxReport run_abx_cells(const std::vector<AbxCell>& cells,
                        std::uint64_t candidates_skipped,
                        const std::vector<FeatureMatrix>& token_features,
                        AbxKind condition, const DistanceSpec& spec,
                        const RunOptions& options);

}  // namespace zsabx

#endif  // ZSABX_ABX_SCORE_H_
