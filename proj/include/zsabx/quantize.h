// zsabx/quantize.h
//
// k-means codebooks for unit-level evaluation and pseudo-labels:
// k-means++ initialization, Lloyd iterations, nearest-centroid assignment,
// and unit-to-feature re-encoding.

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

#ifndef ZSABX_QUANTIZE_H_
#define ZSABX_QUANTIZE_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "zsabx/featstore.h"

namespace zsabx {

struct Codebook {
  std::size_t k = 0;
  std::size_t dim = 0;
  std::vector<double> centroids;  // k x dim, row-major
  double inertia = 0.0;
  std::size_t iterations_run = 0;
  std::int64_t seed = 0;
  std::vector<double> inertia_trace;  // one entry per Lloyd iteration

  const double* centroid(std::size_t j) const { return centroids.data() + j * dim; }
};

struct UnitSequence {
  std::string utterance_id;
  std::vector<std::uint32_t> units;  // one per frame, each < k
};

enum class UnitEncoding { kOneHot, kCentroid };

// k-means++ init (deterministic for a fixed seed), Lloyd iterations until
// the relative inertia improvement drops below tol or max_iter is reached.
// Empty clusters are reseeded to the point farthest from its centroid.
// Bit-reproducible for fixed seed and input order, independent of thread
// count (centroid sums fold sequentially over point index).
Codebook fit_kmeans(const std::vector<double>& sample, std::size_t n,
                    std::size_t dim, std::size_t k, std::size_t max_iter,
                    double tol, std::int64_t seed);

// Per frame, the nearest centroid in Euclidean distance; ties take the
// lowest index.
UnitSequence assign_units(const FeatureMatrix& m, const Codebook& cb);

// one_hot: frame i -> k-dim indicator of its unit; centroid: frame i ->
// its centroid vector. frame_rate is preserved.
FeatureMatrix units_to_features(const UnitSequence& u, const Codebook& cb,
                                UnitEncoding encoding, double frame_rate);

// "KMB1" little-endian codebook file.
void save_codebook(const std::filesystem::path& path, const Codebook& cb);
Codebook load_codebook(const std::filesystem::path& path);

// "utt_id u0 u1 u2 ..." text form.
std::string format_unit_sequence(const UnitSequence& u);

}  // namespace zsabx

#endif  // ZSABX_QUANTIZE_H_
