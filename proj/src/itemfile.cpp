// itemfile.cpp

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

#include "zsabx/itemfile.h"

#include <charconv>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "zsabx/common.h"

namespace zsabx {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> cols;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) cols.push_back(tok);
  return cols;
}

double parse_seconds(const std::string& s, const char* what, std::size_t lineno) {
  double v;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw DataError(std::string("non-numeric ") + what + " '" + s +
                    "' at line " + std::to_string(lineno));
  return v;
}

std::string format_seconds(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// header line required, '#' first; returns false at EOF-before-header
void expect_header(std::istream& in, std::size_t& lineno) {
  std::string line;
  if (!std::getline(in, line))
    throw DataError("empty item file (missing header)");
  ++lineno;
  if (line.empty() || line[0] != '#')
    throw DataError("item file must start with a '#' header line");
}

}  // namespace

std::vector<PhoneToken> parse_phone_items(std::istream& in) {
  std::vector<PhoneToken> tokens;
  std::size_t lineno = 0;
  expect_header(in, lineno);
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    auto cols = split_ws(line);
    if (cols.size() != 7 && cols.size() != 8)
      throw DataError("expected 7 or 8 columns, got " +
                      std::to_string(cols.size()) + " at line " +
                      std::to_string(lineno));
    PhoneToken t;
    t.utterance_id = cols[0];
    t.onset = parse_seconds(cols[1], "onset", lineno);
    t.offset = parse_seconds(cols[2], "offset", lineno);
    t.phone = cols[3];
    t.prev_phone = cols[4];
    t.next_phone = cols[5];
    t.speaker = cols[6];
    if (cols.size() == 8) t.language = cols[7];
    if (!(t.onset < t.offset))
      throw DataError("onset >= offset at line " + std::to_string(lineno));
    tokens.push_back(std::move(t));
  }
  return tokens;
}

std::vector<UtteranceRecord> parse_language_items(std::istream& in) {
  std::vector<UtteranceRecord> records;
  std::set<std::string> seen;
  std::size_t lineno = 0;
  expect_header(in, lineno);
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    auto cols = split_ws(line);
    if (cols.size() != 3)
      throw DataError("expected 3 columns, got " + std::to_string(cols.size()) +
                      " at line " + std::to_string(lineno));
    if (!seen.insert(cols[0]).second)
      throw DataError("duplicate utterance_id '" + cols[0] + "' at line " +
                      std::to_string(lineno));
    records.push_back({cols[0], cols[1], cols[2]});
  }
  return records;
}

void serialize_phone_items(const std::vector<PhoneToken>& tokens,
                           std::ostream& out) {
  out << "#file onset offset #phone prev-phone next-phone speaker [language]\n";
  for (const auto& t : tokens) {
    out << t.utterance_id << ' ' << format_seconds(t.onset) << ' '
        << format_seconds(t.offset) << ' ' << t.phone << ' ' << t.prev_phone
        << ' ' << t.next_phone << ' ' << t.speaker;
    if (!t.language.empty()) out << ' ' << t.language;
    out << '\n';
  }
}

void serialize_language_items(const std::vector<UtteranceRecord>& records,
                              std::ostream& out) {
  out << "#file speaker language\n";
  for (const auto& r : records)
    out << r.utterance_id << ' ' << r.speaker << ' ' << r.language << '\n';
}

}  // namespace zsabx
