// test_syngen.cpp

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

#include <fstream>
#include <set>

#include "doctest.h"
#include "test_util.h"
#include "zsabx/abx_score.h"
#include "zsabx/syngen.h"

using namespace zsabx;

namespace {

double phonetic_error(const SynDataset& data, AbxKind kind) {
  AbxCondition condition{kind};
  auto set = build_phonetic_cells(data.phone_tokens, condition);
  DistanceSpec spec{FrameMetric::kCosine, SequenceMode::kDtw};
  // token i's features are utterance i, whole span
  return run_abx_cells(set.cells, set.candidates_skipped, data.matrices, kind,
                       spec, {})
      .final_error_percent;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("generation is deterministic for a fixed seed") {
  SynSpec spec;
  spec.noise_std = 0.3;
  spec.speaker_offset_scale = 0.2;
  spec.seed = 42;
  auto a = generate(spec);
  auto b = generate(spec);
  REQUIRE(a.matrices.size() == b.matrices.size());
  for (std::size_t i = 0; i < a.matrices.size(); ++i) {
    CHECK(a.matrices[i].utterance_id == b.matrices[i].utterance_id);
    CHECK(a.matrices[i].data == b.matrices[i].data);
  }
  CHECK(a.phone_tokens == b.phone_tokens);
  CHECK(a.language_records == b.language_records);

  spec.seed = 43;
  auto c = generate(spec);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.matrices.size() && !any_diff; ++i)
    any_diff = a.matrices[i].data != c.matrices[i].data;
  CHECK(any_diff);
}

TEST_CASE("dataset shape follows the spec fields") {
  SynSpec spec;
  spec.n_phones = 4;
  spec.n_speakers = 3;
  spec.n_languages = 2;
  spec.tokens_per_class = 2;
  spec.language_offset_scale = 0.1;
  auto data = generate(spec);
  CHECK(data.matrices.size() == 4u * 3u * 2u * 2u);
  CHECK(data.phone_tokens.size() == data.matrices.size());
  CHECK(data.language_records.size() == data.matrices.size());
  std::set<std::string> langs, speakers, phones;
  for (const auto& r : data.language_records) langs.insert(r.language);
  for (const auto& t : data.phone_tokens) {
    speakers.insert(t.speaker);
    phones.insert(t.phone);
    CHECK(t.onset < t.offset);
    CHECK(!t.language.empty());  // emitted when n_languages > 1
  }
  CHECK(langs.size() == 2);
  CHECK(speakers.size() == 3);
  CHECK(phones.size() == 4);
  for (std::size_t i = 0; i < data.matrices.size(); ++i) {
    CHECK(data.matrices[i].dim == 8);
    CHECK(data.matrices[i].frames >= 3);
    CHECK(data.matrices[i].frames <= 6);
    CHECK(data.matrices[i].utterance_id == data.phone_tokens[i].utterance_id);
  }

  SUBCASE("every within-speaker cell is populated") {
    AbxCondition condition{AbxKind::kPhoneticWithin};
    auto set = build_phonetic_cells(data.phone_tokens, condition);
    CHECK(!set.cells.empty());
  }
}

TEST_CASE("invalid specs are rejected") {
  SynSpec spec;
  spec.n_phones = 2;
  CHECK_THROWS_AS(spec.validate(), DataError);
  spec = SynSpec{};
  spec.dim = 1;
  CHECK_THROWS_AS(spec.validate(), DataError);
  spec = SynSpec{};
  spec.min_frames_per_token = 5;
  spec.max_frames_per_token = 4;
  CHECK_THROWS_AS(spec.validate(), DataError);
  spec = SynSpec{};
  spec.noise_std = -0.1;
  CHECK_THROWS_AS(spec.validate(), DataError);
}

TEST_CASE("class separation drives phonetic discriminability") {
  SynSpec spec;
  spec.n_phones = 3;
  spec.n_speakers = 2;
  spec.tokens_per_class = 3;
  spec.noise_std = 0.2;
  spec.seed = 7;

  SUBCASE("zero separation is at chance") {
    spec.class_separation = 0.0;
    auto data = generate(spec);
    double err = phonetic_error(data, AbxKind::kPhoneticWithin);
    CHECK(err > 30.0);
    CHECK(err < 70.0);
  }

  SUBCASE("strong separation is exactly solvable") {
    spec.class_separation = 2.0;  // 10x the noise scale
    auto data = generate(spec);
    CHECK(phonetic_error(data, AbxKind::kPhoneticWithin) == 0.0);
    CHECK(phonetic_error(data, AbxKind::kPhoneticAcross) == 0.0);
  }

  SUBCASE("more separation never hurts") {
    spec.tokens_per_class = 2;
    double prev = 101.0;
    for (double delta : {0.05, 0.5, 2.0}) {
      spec.class_separation = delta;
      auto data = generate(spec);
      double err = phonetic_error(data, AbxKind::kPhoneticWithin);
      CHECK(err <= prev + 15.0);  // monotone up to sampling noise
      prev = err;
    }
    CHECK(prev == 0.0);
  }
}

TEST_CASE("language offsets drive language discriminability") {
  SynSpec spec;
  spec.n_languages = 2;
  spec.n_speakers = 2;
  spec.tokens_per_class = 2;
  spec.noise_std = 0.05;
  spec.class_separation = 0.3;
  spec.seed = 19;

  auto run_language = [](const SynDataset& data) {
    AbxCondition condition{AbxKind::kLanguage};
    auto set = build_language_cells(data.language_records, condition);
    DistanceSpec spec_{FrameMetric::kCosine, SequenceMode::kMeanPool};
    return run_abx_cells(set.cells, set.candidates_skipped, data.matrices,
                         AbxKind::kLanguage, spec_, {})
        .final_error_percent;
  };

  spec.language_offset_scale = 3.0;
  double separated = run_language(generate(spec));
  CHECK(separated == 0.0);

  spec.language_offset_scale = 0.0;
  double chance = run_language(generate(spec));
  CHECK(chance > 25.0);
  CHECK(chance < 75.0);
}

TEST_CASE("generate_to_dir writes a loadable, parseable fixture") {
  test::TempDir dir("syngen");
  SynSpec spec;
  spec.n_languages = 2;
  spec.language_offset_scale = 0.1;
  spec.noise_std = 0.1;
  generate_to_dir(spec, dir.path());

  ArchiveReader reader(dir.path());
  std::ifstream pin(dir.path() / "phone_items.item");
  auto tokens = parse_phone_items(pin);
  std::ifstream lin(dir.path() / "language_items.item");
  auto records = parse_language_items(lin);
  auto data = generate(spec);
  CHECK(tokens == data.phone_tokens);
  CHECK(records == data.language_records);
  for (const auto& t : tokens) {
    REQUIRE(reader.contains(t.utterance_id));
    auto m = reader.load(t.utterance_id);
    // archives store f32; generation already truncates, so exact
    bool found = false;
    for (const auto& g : data.matrices)
      if (g.utterance_id == t.utterance_id) {
        CHECK(m.data == g.data);
        found = true;
      }
    CHECK(found);
  }

  SUBCASE("regeneration is byte-identical on disk") {
    auto manifest_a = read_file(dir.path() / "manifest.json");
    auto items_a = read_file(dir.path() / "phone_items.item");
    auto first_fea = read_file(dir.path() / (tokens[0].utterance_id + ".fea"));
    test::TempDir dir2("syngen2");
    generate_to_dir(spec, dir2.path());
    CHECK(read_file(dir2.path() / "manifest.json") == manifest_a);
    CHECK(read_file(dir2.path() / "phone_items.item") == items_a);
    CHECK(read_file(dir2.path() / (tokens[0].utterance_id + ".fea")) ==
          first_fea);
  }
}

TEST_CASE("spec json parsing applies per-field defaults") {
  test::TempDir dir("synspec");
  auto path = dir.path() / "spec.json";
  {
    std::ofstream out(path);
    out << "{\"n_phones\": 5, \"noise_std\": 0.25, \"seed\": 99}\n";
  }
  auto spec = SynSpec::from_json_file(path);
  CHECK(spec.n_phones == 5);
  CHECK(spec.noise_std == 0.25);
  CHECK(spec.seed == 99);
  CHECK(spec.dim == 8);           // default
  CHECK(spec.n_speakers == 2);    // default
  CHECK(spec.frame_rate == 100.0);

  std::ofstream bad(path, std::ios::trunc);
  bad << "not json";
  bad.close();
  CHECK_THROWS_AS(SynSpec::from_json_file(path), DataError);
}
