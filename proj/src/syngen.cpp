// syngen.cpp

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

#include "zsabx/syngen.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "zsabx/common.h"

namespace zsabx {

void SynSpec::validate() const {
  if (n_phones < 3)
    throw DataError("syngen: n_phones must be >= 3 for context coverage");
  if (n_speakers < 1 || n_languages < 1 || tokens_per_class < 1)
    throw DataError("syngen: counts must be >= 1");
  if (dim < 2) throw DataError("syngen: dim must be >= 2");
  if (min_frames_per_token < 1 || max_frames_per_token < min_frames_per_token)
    throw DataError("syngen: bad frames_per_token range");
  if (class_separation < 0.0 || speaker_offset_scale < 0.0 ||
      language_offset_scale < 0.0 || noise_std < 0.0)
    throw DataError("syngen: scales must be non-negative");
  if (!(frame_rate > 0.0)) throw DataError("syngen: frame_rate must be positive");
}

SynSpec SynSpec::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open syngen spec: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed syngen spec: " + std::string(e.what()));
  }
  SynSpec s;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
  };
  get("n_phones", s.n_phones);
  get("n_speakers", s.n_speakers);
  get("n_languages", s.n_languages);
  get("tokens_per_class", s.tokens_per_class);
  get("dim", s.dim);
  get("min_frames_per_token", s.min_frames_per_token);
  get("max_frames_per_token", s.max_frames_per_token);
  get("class_separation", s.class_separation);
  get("speaker_offset_scale", s.speaker_offset_scale);
  get("language_offset_scale", s.language_offset_scale);
  get("noise_std", s.noise_std);
  get("frame_rate", s.frame_rate);
  get("seed", s.seed);
  return s;
}

namespace {

std::string label(const char* prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%02d", prefix, i);
  return buf;
}

void normalize(std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  s = std::sqrt(s);
  for (double& x : v) x /= s;
}

}  // namespace

SynDataset generate(const SynSpec& spec) {
  spec.validate();
  Rng rng(static_cast<std::uint64_t>(spec.seed));

  const int dim = spec.dim;
  // common anchor direction; phone means fan out from it
  std::vector<double> base(dim, 1.0);
  normalize(base);

  // phone directions: coordinate axes when they fit (guaranteed pairwise
  // spread), random unit vectors otherwise
  std::vector<std::vector<double>> phone_mean(spec.n_phones);
  for (int p = 0; p < spec.n_phones; ++p) {
    std::vector<double> dir(dim, 0.0);
    if (spec.n_phones <= dim) {
      dir[p] = 1.0;
    } else {
      for (int k = 0; k < dim; ++k) dir[k] = rng.next_gaussian();
      normalize(dir);
    }
    std::vector<double> mean(dim);
    for (int k = 0; k < dim; ++k)
      mean[k] = base[k] + spec.class_separation * dir[k];
    normalize(mean);
    phone_mean[p] = std::move(mean);
  }

  std::vector<std::vector<double>> speaker_offset(spec.n_speakers,
                                                  std::vector<double>(dim));
  for (int s = 0; s < spec.n_speakers; ++s)
    for (int k = 0; k < dim; ++k)
      speaker_offset[s][k] = spec.speaker_offset_scale * rng.next_gaussian();

  std::vector<std::vector<double>> language_offset(spec.n_languages,
                                                   std::vector<double>(dim));
  for (int l = 0; l < spec.n_languages; ++l)
    for (int k = 0; k < dim; ++k)
      language_offset[l][k] = spec.language_offset_scale * rng.next_gaussian();

  // context rotation: few enough contexts that within cells stay populated
  int n_contexts = spec.tokens_per_class / 2;
  if (n_contexts < 1) n_contexts = 1;
  if (n_contexts > 3) n_contexts = 3;
  std::vector<std::pair<std::string, std::string>> contexts;
  for (int c = 0; c < n_contexts; ++c)
    contexts.emplace_back(label("p", c % spec.n_phones),
                          label("p", (c + 1) % spec.n_phones));

  SynDataset out;
  const int frame_span =
      spec.max_frames_per_token - spec.min_frames_per_token + 1;
  for (int l = 0; l < spec.n_languages; ++l) {
    for (int s = 0; s < spec.n_speakers; ++s) {
      for (int p = 0; p < spec.n_phones; ++p) {
        for (int t = 0; t < spec.tokens_per_class; ++t) {
          int frames = spec.min_frames_per_token +
                       static_cast<int>(rng.next_below(
                           static_cast<std::uint64_t>(frame_span)));
          FeatureMatrix m;
          char utt[64];
          std::snprintf(utt, sizeof(utt), "utt_l%02d_s%02d_p%02d_t%03d", l, s,
                        p, t);
          m.utterance_id = utt;
          m.frames = static_cast<std::size_t>(frames);
          m.dim = static_cast<std::size_t>(dim);
          m.frame_rate = spec.frame_rate;
          m.data.resize(m.frames * m.dim);
          for (int f = 0; f < frames; ++f)
            for (int k = 0; k < dim; ++k) {
              double v = phone_mean[p][k] + speaker_offset[s][k] +
                         language_offset[l][k] +
                         spec.noise_std * rng.next_gaussian();
              // archives carry f32; keep the in-memory fixture identical
              m.data[static_cast<std::size_t>(f) * m.dim + k] =
                  static_cast<double>(static_cast<float>(v));
            }

          PhoneToken tok;
          tok.utterance_id = m.utterance_id;
          tok.onset = 0.0;
          tok.offset = static_cast<double>(frames) / spec.frame_rate;
          tok.phone = label("p", p);
          const auto& ctx = contexts[t % n_contexts];
          tok.prev_phone = ctx.first;
          tok.next_phone = ctx.second;
          tok.speaker = label("s", s);
          if (spec.n_languages > 1) tok.language = label("L", l);
          out.phone_tokens.push_back(std::move(tok));

          out.language_records.push_back(
              {m.utterance_id, label("s", s), label("L", l)});
          out.matrices.push_back(std::move(m));
        }
      }
    }
  }
  return out;
}

void generate_to_dir(const SynSpec& spec,
                     const std::filesystem::path& out_dir) {
  SynDataset data = generate(spec);
  write_archive(data.matrices, out_dir);
  {
    std::ofstream out(out_dir / "phone_items.item", std::ios::trunc);
    if (!out) throw DataError("cannot write phone item file");
    serialize_phone_items(data.phone_tokens, out);
  }
  {
    std::ofstream out(out_dir / "language_items.item", std::ios::trunc);
    if (!out) throw DataError("cannot write language item file");
    serialize_language_items(data.language_records, out);
  }
}

}  // namespace zsabx
