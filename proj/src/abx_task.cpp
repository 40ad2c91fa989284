// abx_task.cpp

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

#include "zsabx/abx_task.h"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>

#include "zsabx/common.h"

namespace zsabx {

std::string to_string(AbxKind k) {
  switch (k) {
    case AbxKind::kPhoneticWithin: return "phonetic_within";
    case AbxKind::kPhoneticAcross: return "phonetic_across";
    case AbxKind::kLanguage: return "language";
  }
  return "?";
}

std::string AbxCell::key() const {
  switch (kind) {
    case AbxKind::kPhoneticWithin:
      return "within " + phone_a + " " + phone_b + " " + prev_phone + " " +
             next_phone + " " + speaker_ab;
    case AbxKind::kPhoneticAcross:
      return "across " + phone_a + " " + phone_b + " " + prev_phone + " " +
             next_phone + " " + speaker_ab + " " + speaker_x;
    case AbxKind::kLanguage:
      return "language " + lang_a + " " + lang_b;
  }
  return "?";
}

std::uint64_t AbxCell::triplet_count() const {
  std::uint64_t na = a_tokens.size(), nb = b_tokens.size(), nx = x_tokens.size();
  if (shared_ax_pool) return na * (na - 1) * nb;
  return na * nx * nb;
}

CellSet build_phonetic_cells(const std::vector<PhoneToken>& tokens,
                             const AbxCondition& condition) {
  if (condition.kind == AbxKind::kLanguage)
    throw ContractError("build_phonetic_cells: wrong condition kind");
  // (prev, next) -> speaker -> phone -> sorted token indices
  using PhonePools = std::map<std::string, std::vector<std::int32_t>>;
  std::map<std::pair<std::string, std::string>,
           std::map<std::string, PhonePools>>
      by_context;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    by_context[{t.prev_phone, t.next_phone}][t.speaker][t.phone].push_back(
        static_cast<std::int32_t>(i));
  }

  CellSet out;
  const bool within = condition.kind == AbxKind::kPhoneticWithin;
  for (const auto& [ctx, speakers] : by_context) {
    if (within) {
      for (const auto& [spk, phones] : speakers) {
        for (const auto& [pa, pool_a] : phones) {
          for (const auto& [pb, pool_b] : phones) {
            if (pa == pb) continue;
            if (pool_a.size() < static_cast<std::size_t>(condition.min_class_a) ||
                pool_b.size() < static_cast<std::size_t>(condition.min_class_b)) {
              ++out.candidates_skipped;
              continue;
            }
            AbxCell cell;
            cell.kind = AbxKind::kPhoneticWithin;
            cell.phone_a = pa;
            cell.phone_b = pb;
            cell.prev_phone = ctx.first;
            cell.next_phone = ctx.second;
            cell.speaker_ab = spk;
            cell.speaker_x = spk;
            cell.a_tokens = pool_a;
            cell.b_tokens = pool_b;
            cell.x_tokens = pool_a;
            cell.shared_ax_pool = true;
            out.cells.push_back(std::move(cell));
          }
        }
      }
    } else {
      for (const auto& [s1, phones1] : speakers) {
        for (const auto& [s2, phones2] : speakers) {
          if (s1 == s2) continue;
          for (const auto& [pa, pool_a] : phones1) {
            auto x_it = phones2.find(pa);
            for (const auto& [pb, pool_b] : phones1) {
              if (pa == pb) continue;
              if (x_it == phones2.end() || pool_a.empty() ||
                  pool_b.size() < static_cast<std::size_t>(condition.min_class_b)) {
                ++out.candidates_skipped;
                continue;
              }
              AbxCell cell;
              cell.kind = AbxKind::kPhoneticAcross;
              cell.phone_a = pa;
              cell.phone_b = pb;
              cell.prev_phone = ctx.first;
              cell.next_phone = ctx.second;
              cell.speaker_ab = s1;
              cell.speaker_x = s2;
              cell.a_tokens = pool_a;
              cell.b_tokens = pool_b;
              cell.x_tokens = x_it->second;
              cell.shared_ax_pool = false;
              out.cells.push_back(std::move(cell));
            }
          }
        }
      }
    }
  }
  std::sort(out.cells.begin(), out.cells.end(),
            [](const AbxCell& a, const AbxCell& b) { return a.key() < b.key(); });
  return out;
}

CellSet build_language_cells(const std::vector<UtteranceRecord>& records,
                             const AbxCondition& condition) {
  std::map<std::string, std::vector<std::int32_t>> by_language;
  for (std::size_t i = 0; i < records.size(); ++i)
    by_language[records[i].language].push_back(static_cast<std::int32_t>(i));
  if (by_language.size() < 2)
    throw DataError("language ABX needs >= 2 distinct languages, got " +
                    std::to_string(by_language.size()));
  CellSet out;
  for (const auto& [la, pool_a] : by_language) {
    for (const auto& [lb, pool_b] : by_language) {
      if (la == lb) continue;
      if (pool_a.size() < static_cast<std::size_t>(condition.min_class_a) ||
          pool_b.size() < static_cast<std::size_t>(condition.min_class_b)) {
        ++out.candidates_skipped;
        continue;
      }
      AbxCell cell;
      cell.kind = AbxKind::kLanguage;
      cell.lang_a = la;
      cell.lang_b = lb;
      cell.a_tokens = pool_a;
      cell.b_tokens = pool_b;
      cell.x_tokens = pool_a;
      cell.shared_ax_pool = true;
      out.cells.push_back(std::move(cell));
    }
  }
  // map iteration is already sorted by language pair
  return out;
}

std::vector<Triplet> enumerate_triplets(const AbxCell& cell) {
  std::vector<Triplet> triplets;
  triplets.reserve(cell.triplet_count());
  for (std::int32_t a : cell.a_tokens)
    for (std::int32_t x : cell.x_tokens) {
      if (cell.shared_ax_pool && a == x) continue;
      for (std::int32_t b : cell.b_tokens) triplets.push_back({a, b, x});
    }
  return triplets;
}

std::vector<Triplet> sample_triplets(const AbxCell& cell,
                                     std::uint64_t max_triplets,
                                     std::uint64_t seed) {
  std::vector<Triplet> all = enumerate_triplets(cell);
  if (max_triplets == 0 || all.size() <= max_triplets) return all;
  // reservoir sampling with a stream salted by the cell key, then restore
  // enumeration order so the draw is a deterministic subset
  Rng rng = Rng(seed).split(hash_string(cell.key()));
  std::vector<std::uint64_t> picked(max_triplets);
  for (std::uint64_t i = 0; i < max_triplets; ++i) picked[i] = i;
  for (std::uint64_t i = max_triplets; i < all.size(); ++i) {
    std::uint64_t j = rng.next_below(i + 1);
    if (j < max_triplets) picked[j] = i;
  }
  std::sort(picked.begin(), picked.end());
  std::vector<Triplet> out;
  out.reserve(max_triplets);
  for (std::uint64_t idx : picked) out.push_back(all[idx]);
  return out;
}

void dump_cells(const std::vector<AbxCell>& cells, std::ostream& out) {
  for (const auto& c : cells)
    out << c.key() << " |A|=" << c.a_tokens.size() << " |B|="
        << c.b_tokens.size() << " |X|=" << c.x_tokens.size()
        << " triplets=" << c.triplet_count() << "\n";
}

}  // namespace zsabx
