// kernels.cpp

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

#include "zsabx/kernels.h"

#include <algorithm>
#include <cmath>

#include "zsabx/common.h"

namespace zsabx {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kNormFloor = 1e-12;

// identical vectors must score exactly 0, not 1 - fl(dot/(nu*nv))
bool same_vector(const double* u, const double* v, std::size_t dim) {
  for (std::size_t i = 0; i < dim; ++i)
    if (u[i] != v[i]) return false;
  return true;
}
}  // namespace

std::string to_string(FrameMetric m) {
  return m == FrameMetric::kCosine ? "cosine" : "angular";
}

std::string to_string(SequenceMode m) {
  return m == SequenceMode::kDtw ? "dtw" : "mean_pool";
}

FrameMetric frame_metric_from_string(const std::string& s) {
  if (s == "cosine") return FrameMetric::kCosine;
  if (s == "angular") return FrameMetric::kAngular;
  throw DataError("unknown frame metric: " + s);
}

SequenceMode sequence_mode_from_string(const std::string& s) {
  if (s == "dtw") return SequenceMode::kDtw;
  if (s == "mean_pool") return SequenceMode::kMeanPool;
  throw DataError("unknown sequence mode: " + s);
}

double frame_distance(std::span<const double> u, std::span<const double> v,
                      FrameMetric metric) {
  if (u.size() != v.size())
    throw ContractError("frame_distance: dim mismatch " +
                        std::to_string(u.size()) + " vs " +
                        std::to_string(v.size()));
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  nu = std::sqrt(nu);
  nv = std::sqrt(nv);
  if (nu < kNormFloor || nv < kNormFloor)
    return metric == FrameMetric::kCosine ? 1.0 : 0.5;
  if (same_vector(u.data(), v.data(), u.size())) return 0.0;
  double ratio = std::clamp(dot / (nu * nv), -1.0, 1.0);
  if (metric == FrameMetric::kCosine) return 1.0 - ratio;
  return std::acos(ratio) / kPi;
}

std::vector<double> distance_matrix(const FeatureMatrix& x,
                                    const FeatureMatrix& y,
                                    FrameMetric metric) {
  if (x.dim != y.dim)
    throw ContractError("distance_matrix: dim mismatch");
  std::vector<double> d(x.frames * y.frames);
  // precompute inverse norms once per frame; falls back to the scalar
  // definition for degenerate rows
  std::vector<double> nx(x.frames), ny(y.frames);
  for (std::size_t i = 0; i < x.frames; ++i) {
    double s = 0.0;
    const double* r = x.row(i);
    for (std::size_t k = 0; k < x.dim; ++k) s += r[k] * r[k];
    nx[i] = std::sqrt(s);
  }
  for (std::size_t j = 0; j < y.frames; ++j) {
    double s = 0.0;
    const double* r = y.row(j);
    for (std::size_t k = 0; k < y.dim; ++k) s += r[k] * r[k];
    ny[j] = std::sqrt(s);
  }
  for (std::size_t i = 0; i < x.frames; ++i) {
    const double* xr = x.row(i);
    for (std::size_t j = 0; j < y.frames; ++j) {
      if (nx[i] < kNormFloor || ny[j] < kNormFloor) {
        d[i * y.frames + j] = metric == FrameMetric::kCosine ? 1.0 : 0.5;
        continue;
      }
      const double* yr = y.row(j);
      if (same_vector(xr, yr, x.dim)) {
        d[i * y.frames + j] = 0.0;
        continue;
      }
      double dot = 0.0;
      for (std::size_t k = 0; k < x.dim; ++k) dot += xr[k] * yr[k];
      double ratio = std::clamp(dot / (nx[i] * ny[j]), -1.0, 1.0);
      d[i * y.frames + j] = metric == FrameMetric::kCosine
                                ? 1.0 - ratio
                                : std::acos(ratio) / kPi;
    }
  }
  return d;
}

double dtw_distance(const FeatureMatrix& x, const FeatureMatrix& y,
                    FrameMetric metric) {
  if (x.frames == 0 || y.frames == 0)
    throw ContractError("dtw_distance: empty sequence");
  const std::size_t n = x.frames, m = y.frames;
  std::vector<double> d = distance_matrix(x, y, metric);
  std::vector<double> cost(n * m);
  std::vector<std::uint32_t> len(n * m);
  cost[0] = d[0];
  len[0] = 1;
  for (std::size_t i = 1; i < n; ++i) {
    cost[i * m] = cost[(i - 1) * m] + d[i * m];
    len[i * m] = len[(i - 1) * m] + 1;
  }
  for (std::size_t j = 1; j < m; ++j) {
    cost[j] = cost[j - 1] + d[j];
    len[j] = len[j - 1] + 1;
  }
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 1; j < m; ++j) {
      // predecessor preference on exact cost ties: diagonal, (1,0), (0,1)
      double c_diag = cost[(i - 1) * m + (j - 1)];
      double c_up = cost[(i - 1) * m + j];
      double c_left = cost[i * m + (j - 1)];
      std::size_t best = (i - 1) * m + (j - 1);
      double best_c = c_diag;
      if (c_up < best_c) {
        best_c = c_up;
        best = (i - 1) * m + j;
      }
      if (c_left < best_c) {
        best_c = c_left;
        best = i * m + (j - 1);
      }
      cost[i * m + j] = best_c + d[i * m + j];
      len[i * m + j] = len[best] + 1;
    }
  }
  return cost[n * m - 1] / static_cast<double>(len[n * m - 1]);
}

std::vector<double> mean_pool(const FeatureMatrix& x) {
  if (x.frames == 0) throw ContractError("mean_pool: empty sequence");
  std::vector<double> mean(x.dim, 0.0);
  for (std::size_t i = 0; i < x.frames; ++i) {
    const double* r = x.row(i);
    for (std::size_t k = 0; k < x.dim; ++k) mean[k] += r[k];
  }
  for (double& v : mean) v /= static_cast<double>(x.frames);
  return mean;
}

double pooled_distance(const FeatureMatrix& x, const FeatureMatrix& y,
                       FrameMetric metric) {
  auto mx = mean_pool(x);
  auto my = mean_pool(y);
  return frame_distance(mx, my, metric);
}

}  // namespace zsabx
