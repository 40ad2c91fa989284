// zsabx/kernels.h
//
// Distance primitives: frame-wise cosine/angular distance, pairwise
// distance matrices, DTW sequence distance, and mean-pooled utterance
// distance. All kernels are pure and accumulate in f64.

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

#ifndef ZSABX_KERNELS_H_
#define ZSABX_KERNELS_H_

#include <span>
#include <string>
#include <vector>

#include "zsabx/featstore.h"

namespace zsabx {

enum class FrameMetric { kCosine, kAngular };
enum class SequenceMode { kDtw, kMeanPool };

struct DistanceSpec {
  FrameMetric frame_metric = FrameMetric::kCosine;
  SequenceMode sequence_mode = SequenceMode::kDtw;
};

std::string to_string(FrameMetric m);
std::string to_string(SequenceMode m);
FrameMetric frame_metric_from_string(const std::string& s);
SequenceMode sequence_mode_from_string(const std::string& s);

// cosine: 1 - clamp(u.v / (|u||v|), -1, 1), in [0, 2]
// angular: arccos(clamped ratio) / pi, in [0, 1]
// A vector with norm < 1e-12 yields the chance-level distance
// (1 for cosine, 0.5 for angular) instead of NaN.
double frame_distance(std::span<const double> u, std::span<const double> v,
                      FrameMetric metric);

// frames_x x frames_y matrix of frame distances, row-major.
std::vector<double> distance_matrix(const FeatureMatrix& x,
                                    const FeatureMatrix& y,
                                    FrameMetric metric);

// Minimal-cost monotone alignment with steps {(1,0),(0,1),(1,1)} over all
// visited cells, normalized by alignment path length. DP ties prefer the
// diagonal step, then (1,0), then (0,1); the tie order is part of the
// contract because it fixes the path length and hence the normalization.
double dtw_distance(const FeatureMatrix& x, const FeatureMatrix& y,
                    FrameMetric metric);

// Arithmetic mean per dimension.
std::vector<double> mean_pool(const FeatureMatrix& x);

// frame_distance between the two mean-pooled vectors.
double pooled_distance(const FeatureMatrix& x, const FeatureMatrix& y,
                       FrameMetric metric);

}  // namespace zsabx

#endif  // ZSABX_KERNELS_H_
