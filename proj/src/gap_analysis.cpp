// gap_analysis.cpp

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

#include "zsabx/gap_analysis.h"

#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "json.hpp"
#include "zsabx/common.h"

namespace zsabx {

std::string to_string(ModelStage s) {
  switch (s) {
    case ModelStage::kSsl: return "SSL";
    case ModelStage::kSslA: return "SSL_A";
    case ModelStage::kVgsPlus: return "VGS_plus";
  }
  return "?";
}

std::string to_string(Setting s) {
  return s == Setting::kMonolingual ? "monolingual" : "bilingual";
}

ModelStage stage_from_string(const std::string& s) {
  if (s == "SSL") return ModelStage::kSsl;
  if (s == "SSL_A") return ModelStage::kSslA;
  if (s == "VGS_plus" || s == "VGS+") return ModelStage::kVgsPlus;
  throw DataError("unknown model stage: " + s);
}

Setting setting_from_string(const std::string& s) {
  if (s == "monolingual") return Setting::kMonolingual;
  if (s == "bilingual") return Setting::kBilingual;
  throw DataError("unknown setting: " + s);
}

double row_average(double ws, double as_) { return (ws + as_) / 2.0; }

double relative_gap(double mono, double bili) {
  if (!(mono > 0.0))
    throw DataError("relative_gap: monolingual error must be positive");
  return 100.0 * (bili - mono) / mono;
}

double relative_gain(double baseline, double grounded) {
  if (!(baseline > 0.0))
    throw DataError("relative_gain: baseline error must be positive");
  return 100.0 * (baseline - grounded) / baseline;
}

namespace {

const ResultRow* find_row(const std::vector<ResultRow>& rows, ModelStage stage,
                          Setting setting) {
  for (const auto& r : rows)
    if (r.stage == stage && r.setting == setting) return &r;
  return nullptr;
}

}  // namespace

GapReport analyze(const std::vector<ResultRow>& rows) {
  for (const auto& r : rows)
    if (r.ws_error < 0.0 || r.ws_error > 100.0 || r.as_error < 0.0 ||
        r.as_error > 100.0)
      throw DataError("error rates must be in [0, 100]");

  std::string missing;
  auto need = [&](ModelStage stage, Setting setting) {
    const ResultRow* r = find_row(rows, stage, setting);
    if (!r) {
      if (!missing.empty()) missing += ", ";
      missing += to_string(stage) + "/" + to_string(setting);
    }
    return r;
  };
  const ResultRow* ssla_mono = need(ModelStage::kSslA, Setting::kMonolingual);
  const ResultRow* ssla_bili = need(ModelStage::kSslA, Setting::kBilingual);
  const ResultRow* vgs_mono = need(ModelStage::kVgsPlus, Setting::kMonolingual);
  const ResultRow* vgs_bili = need(ModelStage::kVgsPlus, Setting::kBilingual);
  if (!missing.empty()) throw DataError("missing result rows: " + missing);

  GapReport report;
  report.rows = rows;
  for (const auto& r : rows)
    report.row_averages.push_back(row_average(r.ws_error, r.as_error));

  // The Avg column is the published two-decimal row average; the avg-level
  // gaps and the gains x/z are ratios of those column values, so they go
  // through the same rounding the table does. The per-column gaps use the
  // raw inputs.
  auto avg = [](const ResultRow* r) {
    return round2(row_average(r->ws_error, r->as_error));
  };
  report.y.ws = relative_gap(ssla_mono->ws_error, ssla_bili->ws_error);
  report.y.as = relative_gap(ssla_mono->as_error, ssla_bili->as_error);
  report.y.avg = relative_gap(avg(ssla_mono), avg(ssla_bili));
  report.w.ws = relative_gap(vgs_mono->ws_error, vgs_bili->ws_error);
  report.w.as = relative_gap(vgs_mono->as_error, vgs_bili->as_error);
  report.w.avg = relative_gap(avg(vgs_mono), avg(vgs_bili));
  report.x = relative_gain(avg(ssla_mono), avg(vgs_mono));
  report.z = relative_gain(avg(ssla_bili), avg(vgs_bili));
  report.gap_reduction = report.y.avg > report.w.avg;
  report.differential_benefit = report.z > report.x;
  report.no_multilingual_gap = report.y.avg < 0.0 && report.w.avg < 0.0;
  return report;
}

std::vector<ResultRow> parse_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty results CSV");
  // tolerate whitespace in the header but require the four column names
  {
    std::string squeezed;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) squeezed += c;
    if (squeezed != "stage,setting,ws,as")
      throw DataError("results CSV must start with header 'stage,setting,ws,as'");
  }
  std::vector<ResultRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string stage, setting, ws, as_;
    if (!std::getline(ss, stage, ',') || !std::getline(ss, setting, ',') ||
        !std::getline(ss, ws, ',') || !std::getline(ss, as_))
      throw DataError("malformed CSV row at line " + std::to_string(lineno));
    ResultRow r;
    r.stage = stage_from_string(stage);
    r.setting = setting_from_string(setting);
    try {
      r.ws_error = std::stod(ws);
      r.as_error = std::stod(as_);
    } catch (const std::exception&) {
      throw DataError("non-numeric error rate at line " + std::to_string(lineno));
    }
    rows.push_back(r);
  }
  return rows;
}

std::vector<ResultRow> parse_results_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open results file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed results JSON: " + std::string(e.what()));
  }
  if (!j.contains("rows") || !j["rows"].is_array())
    throw DataError("results JSON missing 'rows' array");
  auto report_error = [](const std::string& report_path) {
    std::ifstream rin(report_path);
    if (!rin) throw DataError("cannot open ABX report: " + report_path);
    nlohmann::json rj;
    rin >> rj;
    if (!rj.contains("final_error_percent"))
      throw DataError("not an ABX report (no final_error_percent): " +
                      report_path);
    return rj["final_error_percent"].get<double>();
  };
  std::vector<ResultRow> rows;
  for (const auto& e : j["rows"]) {
    ResultRow r;
    r.stage = stage_from_string(e.at("stage").get<std::string>());
    r.setting = setting_from_string(e.at("setting").get<std::string>());
    if (e.contains("ws")) {
      r.ws_error = e["ws"].get<double>();
      r.as_error = e.at("as").get<double>();
    } else {
      r.ws_error = report_error(e.at("ws_report").get<std::string>());
      r.as_error = report_error(e.at("as_report").get<std::string>());
    }
    rows.push_back(r);
  }
  return rows;
}

std::string GapReport::to_json() const {
  nlohmann::json jrows = nlohmann::json::array();
  for (std::size_t i = 0; i < rows.size(); ++i)
    jrows.push_back({{"stage", zsabx::to_string(rows[i].stage)},
                     {"setting", zsabx::to_string(rows[i].setting)},
                     {"ws", rows[i].ws_error},
                     {"as", rows[i].as_error},
                     {"avg", row_averages[i]}});
  nlohmann::json j{
      {"rows", jrows},
      {"y", {{"ws", y.ws}, {"as", y.as}, {"avg", y.avg}}},
      {"w", {{"ws", w.ws}, {"as", w.as}, {"avg", w.avg}}},
      {"x", x},
      {"z", z},
      {"verdicts",
       {{"gap_reduction", gap_reduction},
        {"differential_benefit", differential_benefit}}},
      {"no_multilingual_gap", no_multilingual_gap},
  };
  return j.dump(2) + "\n";
}

std::string GapReport::to_table() const {
  std::string out;
  out += "stage      setting      WS      AS      Avg\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-10s %-12s %6s  %6s  %6s\n",
                  zsabx::to_string(rows[i].stage).c_str(),
                  zsabx::to_string(rows[i].setting).c_str(),
                  format_percent2(rows[i].ws_error).c_str(),
                  format_percent2(rows[i].as_error).c_str(),
                  format_percent2(row_averages[i]).c_str());
    out += buf;
  }
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "gap y (SSL_A):   WS %s  AS %s  Avg %s\n"
                "gap w (VGS+):    WS %s  AS %s  Avg %s\n"
                "gain x (mono):   %s\n"
                "gain z (bili):   %s\n",
                format_percent2(y.ws).c_str(), format_percent2(y.as).c_str(),
                format_percent2(y.avg).c_str(), format_percent2(w.ws).c_str(),
                format_percent2(w.as).c_str(), format_percent2(w.avg).c_str(),
                format_percent2(x).c_str(), format_percent2(z).c_str());
  out += buf;
  out += std::string("verdict gap_reduction (y > w): ") +
         (gap_reduction ? "true" : "false") + "\n";
  out += std::string("verdict differential_benefit (z > x): ") +
         (differential_benefit ? "true" : "false") + "\n";
  if (no_multilingual_gap) out += "note: no multilingual gap (y and w negative)\n";
  return out;
}

}  // namespace zsabx
