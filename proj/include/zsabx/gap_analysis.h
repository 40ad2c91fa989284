// zsabx/gap_analysis.h
//
// Multilingual gap (y, w) and grounding gain (x, z) statistics over
// tables of ABX error rates, with the two hypothesis verdicts.

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

#ifndef ZSABX_GAP_ANALYSIS_H_
#define ZSABX_GAP_ANALYSIS_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace zsabx {

enum class ModelStage { kSsl, kSslA, kVgsPlus };
enum class Setting { kMonolingual, kBilingual };

std::string to_string(ModelStage s);
std::string to_string(Setting s);
ModelStage stage_from_string(const std::string& s);
Setting setting_from_string(const std::string& s);

struct ResultRow {
  ModelStage stage = ModelStage::kSsl;
  Setting setting = Setting::kMonolingual;
  double ws_error = 0.0;  // percent
  double as_error = 0.0;  // percent
};

struct GapColumns {
  double ws = 0.0;
  double as = 0.0;
  double avg = 0.0;
};

struct GapReport {
  std::vector<ResultRow> rows;         // echoed inputs
  std::vector<double> row_averages;    // mean(ws, as) per row
  GapColumns y;  // audio-only multilingual gap (bilingual vs monolingual)
  GapColumns w;  // visually grounded multilingual gap
  double x = 0.0;  // monolingual grounding gain, from Avg values
  double z = 0.0;  // bilingual grounding gain, from Avg values
  bool gap_reduction = false;       // y.avg > w.avg
  bool differential_benefit = false;  // z > x
  bool no_multilingual_gap = false;   // y and w both negative

  std::string to_json() const;
  std::string to_table() const;  // plain-text summary, 2-decimal percents
};

// mean of the two column errors
double row_average(double ws, double as_);

// 100 * (bilingual - monolingual) / monolingual; DataError if mono <= 0
double relative_gap(double mono, double bili);

// 100 * (baseline - grounded) / baseline; DataError if baseline <= 0
double relative_gain(double baseline, double grounded);

// Needs SSL_A and VGS+ rows for both settings; everything is computed from
// the unrounded inputs, rounding happens only at print time.
GapReport analyze(const std::vector<ResultRow>& rows);

// "stage,setting,ws,as" CSV with a header line.
std::vector<ResultRow> parse_results_csv(std::istream& in);

// JSON alternative: {"rows":[{"stage":..,"setting":..,"ws":..,"as":..}]}
// where ws/as may instead be given as {"ws_report":path,"as_report":path}
// pointing at ABX report JSON files (final_error_percent is used).
std::vector<ResultRow> parse_results_json(const std::string& path);

}  // namespace zsabx

#endif  // ZSABX_GAP_ANALYSIS_H_
