// featstore.cpp

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

#include "zsabx/featstore.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <unordered_map>

#include "json.hpp"

namespace zsabx {

namespace {

constexpr char kMagic[4] = {'F', 'E', 'A', '1'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const unsigned char* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 |
         std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

}  // namespace

void FeatureMatrix::validate() const {
  if (frames < 1 || dim < 1)
    throw DataError("feature matrix '" + utterance_id + "': frames and dim must be >= 1");
  if (!(frame_rate > 0.0))
    throw DataError("feature matrix '" + utterance_id + "': frame_rate must be positive");
  if (data.size() != frames * dim)
    throw DataError("feature matrix '" + utterance_id + "': data size " +
                    std::to_string(data.size()) + " != frames*dim " +
                    std::to_string(frames * dim));
  for (double v : data)
    if (!std::isfinite(v))
      throw DataError("feature matrix '" + utterance_id + "': non-finite value");
}

FeatureMatrix slice(const FeatureMatrix& m, double onset, double offset) {
  if (!(onset >= 0.0) || !(onset < offset))
    throw DataError("slice of '" + m.utterance_id + "': need 0 <= onset < offset");
  auto to_index = [&](double t) {
    return static_cast<long long>(std::floor(t * m.frame_rate + 0.5));
  };
  long long start = to_index(onset);
  long long end = to_index(offset);
  if (start < 0) start = 0;
  if (end > static_cast<long long>(m.frames)) end = static_cast<long long>(m.frames);
  if (start > static_cast<long long>(m.frames)) start = static_cast<long long>(m.frames);
  if (end <= start)
    throw DataError("empty token: slice [" + std::to_string(onset) + ", " +
                    std::to_string(offset) + ") of '" + m.utterance_id + "'");
  FeatureMatrix out;
  out.utterance_id = m.utterance_id;
  out.frames = static_cast<std::size_t>(end - start);
  out.dim = m.dim;
  out.frame_rate = m.frame_rate;
  out.data.assign(m.data.begin() + start * static_cast<long long>(m.dim),
                  m.data.begin() + end * static_cast<long long>(m.dim));
  return out;
}

void write_feature_file(const std::filesystem::path& path,
                        const FeatureMatrix& m) {
  m.validate();
  std::string buf;
  buf.reserve(24 + m.data.size() * 4);
  buf.append(kMagic, 4);
  put_u32(buf, kVersion);
  put_u32(buf, static_cast<std::uint32_t>(m.frames));
  put_u32(buf, static_cast<std::uint32_t>(m.dim));
  std::uint64_t rate_bits;
  std::memcpy(&rate_bits, &m.frame_rate, 8);
  put_u64(buf, rate_bits);
  for (double v : m.data) {
    float f = static_cast<float>(v);
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_u32(buf, bits);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw DataError("write failed: " + path.string());
}

FeatureMatrix read_feature_file(const std::filesystem::path& path,
                                const std::string& utterance_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open feature file: " + path.string());
  std::string raw((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  if (raw.size() < 24)
    throw DataError("truncated feature file: " + path.string());
  const unsigned char* p = reinterpret_cast<const unsigned char*>(raw.data());
  if (std::memcmp(p, kMagic, 4) != 0)
    throw DataError("bad magic in feature file: " + path.string());
  std::uint32_t version = get_u32(p + 4);
  if (version != kVersion)
    throw DataError("unsupported feature file version " + std::to_string(version) +
                    ": " + path.string());
  FeatureMatrix m;
  m.utterance_id = utterance_id;
  m.frames = get_u32(p + 8);
  m.dim = get_u32(p + 12);
  std::uint64_t rate_bits = get_u64(p + 16);
  std::memcpy(&m.frame_rate, &rate_bits, 8);
  std::size_t payload = m.frames * m.dim * 4;
  if (raw.size() != 24 + payload)
    throw DataError("truncated feature file '" + utterance_id + "': expected " +
                    std::to_string(24 + payload) + " bytes, got " +
                    std::to_string(raw.size()));
  m.data.resize(m.frames * m.dim);
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    std::uint32_t bits = get_u32(p + 24 + i * 4);
    float f;
    std::memcpy(&f, &bits, 4);
    m.data[i] = static_cast<double>(f);
  }
  m.validate();
  return m;
}

ArchiveManifest write_archive(const std::vector<FeatureMatrix>& matrices,
                              const std::filesystem::path& root) {
  std::set<std::string> seen;
  std::size_t dim = 0;
  for (const auto& m : matrices) {
    m.validate();
    if (!seen.insert(m.utterance_id).second)
      throw DataError("duplicate utterance_id: " + m.utterance_id);
    if (dim == 0) dim = m.dim;
    if (m.dim != dim)
      throw DataError("mixed dims in archive: " + std::to_string(m.dim) +
                      " vs " + std::to_string(dim) + " (" + m.utterance_id + ")");
  }
  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec) throw DataError("cannot create archive directory: " + root.string());

  ArchiveManifest manifest;
  nlohmann::json jentries = nlohmann::json::array();
  for (const auto& m : matrices) {
    std::string rel = m.utterance_id + ".fea";
    write_feature_file(root / rel, m);
    manifest.entries.push_back({m.utterance_id, rel, m.frames, m.dim, m.frame_rate});
    jentries.push_back({{"utterance_id", m.utterance_id},
                        {"relative_path", rel},
                        {"frames", m.frames},
                        {"dim", m.dim},
                        {"frame_rate", m.frame_rate}});
  }
  nlohmann::json j{{"entries", jentries}};
  std::ofstream out(root / "manifest.json", std::ios::trunc);
  if (!out) throw DataError("cannot write manifest: " + (root / "manifest.json").string());
  out << j.dump(2) << "\n";
  if (!out) throw DataError("manifest write failed");
  return manifest;
}

ArchiveReader::ArchiveReader(const std::filesystem::path& root) : root_(root) {
  std::ifstream in(root / "manifest.json");
  if (!in) throw DataError("missing manifest: " + (root / "manifest.json").string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed manifest: " + std::string(e.what()));
  }
  if (!j.contains("entries") || !j["entries"].is_array())
    throw DataError("manifest missing 'entries' array");
  std::set<std::string> seen;
  for (const auto& e : j["entries"]) {
    ManifestEntry entry;
    try {
      entry.utterance_id = e.at("utterance_id").get<std::string>();
      entry.relative_path = e.at("relative_path").get<std::string>();
      entry.frames = e.at("frames").get<std::size_t>();
      entry.dim = e.at("dim").get<std::size_t>();
      entry.frame_rate = e.at("frame_rate").get<double>();
    } catch (const nlohmann::json::exception& ex) {
      throw DataError("malformed manifest entry: " + std::string(ex.what()));
    }
    if (!seen.insert(entry.utterance_id).second)
      throw DataError("duplicate utterance_id in manifest: " + entry.utterance_id);
    if (dim_ == 0) dim_ = entry.dim;
    if (entry.dim != dim_)
      throw DataError("mixed dims in manifest: " + entry.utterance_id);
    index_.emplace(entry.utterance_id, manifest_.entries.size());
    manifest_.entries.push_back(std::move(entry));
  }
}

bool ArchiveReader::contains(const std::string& utterance_id) const {
  return index_.count(utterance_id) != 0;
}

std::vector<std::string> ArchiveReader::utterance_ids() const {
  std::vector<std::string> ids;
  ids.reserve(manifest_.entries.size());
  for (const auto& e : manifest_.entries) ids.push_back(e.utterance_id);
  return ids;
}

FeatureMatrix ArchiveReader::load(const std::string& utterance_id) const {
  auto it = index_.find(utterance_id);
  if (it == index_.end())
    throw DataError("utterance not in archive: " + utterance_id);
  const ManifestEntry* entry = &manifest_.entries[it->second];
  FeatureMatrix m = read_feature_file(root_ / entry->relative_path, utterance_id);
  if (m.frames != entry->frames || m.dim != entry->dim ||
      m.frame_rate != entry->frame_rate)
    throw DataError("header/manifest mismatch for '" + utterance_id + "'");
  return m;
}

}  // namespace zsabx
