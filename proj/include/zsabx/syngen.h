// zsabx/syngen.h
//
// Synthetic feature archives and item files with controllable phone,
// speaker, and language structure. Everything downstream of the
// evaluation pipeline can be exercised against an analytic or brute-force
// ground truth on these fixtures.

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

#ifndef ZSABX_SYNGEN_H_
#define ZSABX_SYNGEN_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "zsabx/featstore.h"
#include "zsabx/itemfile.h"

namespace zsabx {

struct SynSpec {
  int n_phones = 3;
  int n_speakers = 2;
  int n_languages = 1;
  int tokens_per_class = 2;  // per (language, speaker, phone)
  int dim = 8;
  int min_frames_per_token = 3;
  int max_frames_per_token = 6;
  double class_separation = 1.0;     // delta: chord spread of phone means
  double speaker_offset_scale = 0.0;
  double language_offset_scale = 0.0;
  double noise_std = 0.0;
  double frame_rate = 100.0;
  std::int64_t seed = 0;

  void validate() const;
  static SynSpec from_json_file(const std::filesystem::path& path);
};

struct SynDataset {
  std::vector<FeatureMatrix> matrices;     // one utterance per token
  std::vector<PhoneToken> phone_tokens;
  std::vector<UtteranceRecord> language_records;
};

// Phone class means sit on the unit hypersphere at a chord spread
// controlled by class_separation; speaker and language offsets are
// additive Gaussians at their scales; per-frame noise on top.
// Contexts rotate round-robin over the phone inventory so every
// (phoneA, phoneB, context, speaker) cell is populated at tiny sizes.
// Fully deterministic given the seed.
SynDataset generate(const SynSpec& spec);

// Writes the feature archive plus phone and language item files
// (phone_items.item, language_items.item) under out_dir.
void generate_to_dir(const SynSpec& spec, const std::filesystem::path& out_dir);

}  // namespace zsabx

#endif  // ZSABX_SYNGEN_H_
