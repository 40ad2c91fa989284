// zsabx/itemfile.h
//
// Evaluation item metadata: phone tokens (with triphone context and speaker)
// for phonetic discrimination, and utterance records (speaker + language)
// for language discrimination.

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

#ifndef ZSABX_ITEMFILE_H_
#define ZSABX_ITEMFILE_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace zsabx {

struct PhoneToken {
  std::string utterance_id;
  double onset = 0.0;   // seconds
  double offset = 0.0;  // seconds
  std::string phone;
  std::string prev_phone;
  std::string next_phone;
  std::string speaker;
  std::string language;  // empty when the optional column is absent

  bool operator==(const PhoneToken&) const = default;
};

struct UtteranceRecord {
  std::string utterance_id;
  std::string speaker;
  std::string language;

  bool operator==(const UtteranceRecord&) const = default;
};

// Columns: file onset offset phone prev next speaker [language],
// whitespace separated, single '#' header line first. Strict: anything
// else (blank lines, extra comments, wrong column counts) is a DataError
// with a line number.
std::vector<PhoneToken> parse_phone_items(std::istream& in);

// Columns: file speaker language. Duplicate utterance ids are a DataError.
std::vector<UtteranceRecord> parse_language_items(std::istream& in);

void serialize_phone_items(const std::vector<PhoneToken>& tokens,
                           std::ostream& out);
void serialize_language_items(const std::vector<UtteranceRecord>& records,
                              std::ostream& out);

}  // namespace zsabx

#endif  // ZSABX_ITEMFILE_H_
