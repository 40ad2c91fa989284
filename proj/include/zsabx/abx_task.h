// zsabx/abx_task.h
//
// Enumeration of scorable ABX cells and triplets. A cell fixes the A/B
// classes (phone-in-context per speaker, or language) plus the token pools;
// triplets are all (A, B, X) draws from those pools.

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

#ifndef ZSABX_ABX_TASK_H_
#define ZSABX_ABX_TASK_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "zsabx/itemfile.h"

namespace zsabx {

enum class AbxKind { kPhoneticWithin, kPhoneticAcross, kLanguage };

std::string to_string(AbxKind k);

struct AbxCondition {
  AbxKind kind = AbxKind::kPhoneticWithin;
  int min_class_a = 2;  // A and X drawn without replacement when pools coincide
  int min_class_b = 1;
};

struct AbxCell {
  AbxKind kind = AbxKind::kPhoneticWithin;
  // phonetic keys
  std::string phone_a, phone_b;
  std::string prev_phone, next_phone;
  std::string speaker_ab;  // speaker of A and B
  std::string speaker_x;   // == speaker_ab for within
  // language keys
  std::string lang_a, lang_b;

  // indices into the source token/record list
  std::vector<std::int32_t> a_tokens, b_tokens, x_tokens;
  // when true, A and X share one pool and A != X is enforced per triplet
  bool shared_ax_pool = false;

  // sortable, unique within a run; also the audit-dump key
  std::string key() const;
  std::uint64_t triplet_count() const;
};

struct CellSet {
  std::vector<AbxCell> cells;
  std::uint64_t candidates_skipped = 0;  // candidate cells below pool minima
};

// Within: one cell per ordered (phoneA, phoneB) x context x speaker with
// |A| >= min_class_a and |B| >= min_class_b; A and X share the pool.
// Across: one cell per ordered (phoneA, phoneB) x context x ordered
// (speaker_ab, speaker_x) pair with nonempty pools; X pool is speaker_x's
// phoneA tokens in the same context.
// Cells come out sorted by key; the result depends only on the token
// multiset, not its order.
CellSet build_phonetic_cells(const std::vector<PhoneToken>& tokens,
                             const AbxCondition& condition);

// One cell per ordered language pair; A and X share the utterance pool of
// the first language. Throws DataError with < 2 languages.
CellSet build_language_cells(const std::vector<UtteranceRecord>& records,
                             const AbxCondition& condition);

struct Triplet {
  std::int32_t a, b, x;
};

// All triplets of a cell in deterministic (a, x, b) lexicographic pool
// order. A == X is excluded when the pools are shared.
std::vector<Triplet> enumerate_triplets(const AbxCell& cell);

// Seeded uniform downsample to at most max_triplets per cell. The RNG
// stream is salted with the cell key, so the draw is independent of cell
// enumeration order. Returns all triplets when under the cap.
std::vector<Triplet> sample_triplets(const AbxCell& cell,
                                     std::uint64_t max_triplets,
                                     std::uint64_t seed);

// Audit listing, one line per cell: kind, key, pool sizes, triplet count.
void dump_cells(const std::vector<AbxCell>& cells, std::ostream& out);

}  // namespace zsabx

#endif  // ZSABX_ABX_TASK_H_
