// zsabx/featstore.h
//
// Frame-level feature archives: one little-endian binary file per utterance
// plus a JSON manifest. Archives are immutable once written; readers are
// safe to share across threads.

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

#ifndef ZSABX_FEATSTORE_H_
#define ZSABX_FEATSTORE_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "zsabx/common.h"

namespace zsabx {

// A frames x dim row-major matrix of frame-level representations.
// Payload is stored on disk as f32; in memory everything is f64.
struct FeatureMatrix {
  std::string utterance_id;
  std::size_t frames = 0;
  std::size_t dim = 0;
  double frame_rate = 0.0;  // frames per second
  std::vector<double> data;  // frames * dim, row-major

  const double* row(std::size_t i) const { return data.data() + i * dim; }
  double at(std::size_t i, std::size_t j) const { return data[i * dim + j]; }

  // throws DataError on frames/dim/frame_rate out of range, size mismatch,
  // or non-finite values
  void validate() const;
};

// Extract the frame span covering [onset, offset) seconds.
// Frame indices use round-half-up of time * frame_rate, half-open,
// clipped to [0, frames]. Throws DataError("empty token ...") if the
// clipped span is empty.
FeatureMatrix slice(const FeatureMatrix& m, double onset, double offset);

struct ManifestEntry {
  std::string utterance_id;
  std::string relative_path;
  std::size_t frames = 0;
  std::size_t dim = 0;
  double frame_rate = 0.0;
};

struct ArchiveManifest {
  std::vector<ManifestEntry> entries;
};

// Writes one binary file per utterance under root plus manifest.json.
// All matrices must share one dim and have unique utterance_ids.
ArchiveManifest write_archive(const std::vector<FeatureMatrix>& matrices,
                              const std::filesystem::path& root);

// Lazy reader over an archive directory. Loading is on demand and
// stateless per call, so concurrent load() from many threads is safe.
class ArchiveReader {
 public:
  explicit ArchiveReader(const std::filesystem::path& root);

  const ArchiveManifest& manifest() const { return manifest_; }
  bool contains(const std::string& utterance_id) const;
  // throws DataError if missing, or if the file header disagrees with the
  // manifest, or the payload is truncated / non-finite
  FeatureMatrix load(const std::string& utterance_id) const;

  // common dim of all entries (0 for an empty archive)
  std::size_t dim() const { return dim_; }
  std::vector<std::string> utterance_ids() const;

 private:
  std::filesystem::path root_;
  ArchiveManifest manifest_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t dim_ = 0;
};

// Single-file codec, exposed for tools and tests.
void write_feature_file(const std::filesystem::path& path,
                        const FeatureMatrix& m);
FeatureMatrix read_feature_file(const std::filesystem::path& path,
                                const std::string& utterance_id);

}  // namespace zsabx

#endif  // ZSABX_FEATSTORE_H_
