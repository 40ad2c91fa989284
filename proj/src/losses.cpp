// losses.cpp

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

#include "zsabx/losses.h"

#include <algorithm>
#include <cmath>

#include "zsabx/common.h"

namespace zsabx {

namespace {

// row-normalized copy; throws on zero-norm rows
std::vector<double> normalize_rows(const std::vector<double>& x, std::size_t n,
                                   std::size_t d, std::vector<double>* norms) {
  std::vector<double> out(n * d);
  norms->resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += x[i * d + j] * x[i * d + j];
    double norm = std::sqrt(s);
    if (norm < 1e-12)
      throw DataError("batch row " + std::to_string(i) + " has zero norm");
    (*norms)[i] = norm;
    for (std::size_t j = 0; j < d; ++j) out[i * d + j] = x[i * d + j] / norm;
  }
  return out;
}

// S = A_hat * V_hat^T, n x n
std::vector<double> similarity(const std::vector<double>& a,
                               const std::vector<double>& v, std::size_t n,
                               std::size_t d) {
  std::vector<double> s(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < d; ++k) dot += a[i * d + k] * v[j * d + k];
      s[i * n + j] = dot;
    }
  return s;
}

double log_sum_exp(const double* v, std::size_t n, std::size_t stride) {
  double mx = v[0];
  for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, v[i * stride]);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(v[i * stride] - mx);
  return mx + std::log(s);
}

}  // namespace

void BatchPair::validate() const {
  if (n < 1 || d < 1) throw DataError("batch: n and d must be >= 1");
  if (audio.size() != n * d || image.size() != n * d)
    throw DataError("batch: embedding size mismatch");
  for (double v : audio)
    if (!std::isfinite(v)) throw DataError("batch: non-finite audio value");
  for (double v : image)
    if (!std::isfinite(v)) throw DataError("batch: non-finite image value");
}

double masked_ce(const std::vector<double>& logits, std::size_t m,
                 std::size_t k, const std::vector<std::int32_t>& labels,
                 const std::vector<bool>& mask) {
  if (logits.size() != m * k)
    throw ContractError("masked_ce: logits size mismatch");
  if (labels.size() != m || mask.size() != m)
    throw ContractError("masked_ce: labels/mask size mismatch");
  double sum = 0.0;
  std::size_t masked = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (!mask[i]) continue;
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= k)
      throw DataError("masked_ce: label " + std::to_string(labels[i]) +
                      " out of range at position " + std::to_string(i));
    const double* row = logits.data() + i * k;
    double lse = log_sum_exp(row, k, 1);
    sum += lse - row[labels[i]];
    ++masked;
  }
  if (masked == 0) throw DataError("masked_ce: empty mask");
  return sum / static_cast<double>(masked);
}

double contrastive_av(const BatchPair& batch, double temperature) {
  batch.validate();
  if (!(temperature > 0.0))
    throw ContractError("contrastive_av: temperature must be positive");
  const std::size_t n = batch.n, d = batch.d;
  std::vector<double> na, nv;
  auto a = normalize_rows(batch.audio, n, d, &na);
  auto v = normalize_rows(batch.image, n, d, &nv);
  auto s = similarity(a, v, n, d);
  double inv_t = 1.0 / temperature;
  std::vector<double> scaled(n * n);
  for (std::size_t i = 0; i < n * n; ++i) scaled[i] = s[i] * inv_t;
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // audio i against all images (row), image i against all audios (column)
    loss += log_sum_exp(scaled.data() + i * n, n, 1) - scaled[i * n + i];
    loss += log_sum_exp(scaled.data() + i, n, n) - scaled[i * n + i];
  }
  return loss / (2.0 * static_cast<double>(n));
}

double combined_loss(double l_a, double l_av, double alpha) {
  if (!std::isfinite(l_a) || !std::isfinite(l_av))
    throw ContractError("combined_loss: non-finite input");
  return (1.0 - alpha) * l_a + alpha * l_av;
}

GradPair grad_contrastive_av(const BatchPair& batch, double temperature) {
  batch.validate();
  if (!(temperature > 0.0))
    throw ContractError("grad_contrastive_av: temperature must be positive");
  const std::size_t n = batch.n, d = batch.d;
  std::vector<double> na, nv;
  auto a = normalize_rows(batch.audio, n, d, &na);
  auto v = normalize_rows(batch.image, n, d, &nv);
  auto s = similarity(a, v, n, d);
  const double inv_t = 1.0 / temperature;

  // dL/dS_ij = (p_ij - I_ij + q_ij - I_ij) / (2 n t)
  // p: row softmax (audio->image), q: column softmax (image->audio)
  std::vector<double> g(n * n);
  // row softmax of S/t
  for (std::size_t i = 0; i < n; ++i) {
    double mx = -1e300;
    for (std::size_t j = 0; j < n; ++j) mx = std::max(mx, s[i * n + j] * inv_t);
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) z += std::exp(s[i * n + j] * inv_t - mx);
    for (std::size_t j = 0; j < n; ++j)
      g[i * n + j] = std::exp(s[i * n + j] * inv_t - mx) / z;
  }
  // add column softmax of S/t
  for (std::size_t j = 0; j < n; ++j) {
    double mx = -1e300;
    for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, s[i * n + j] * inv_t);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) z += std::exp(s[i * n + j] * inv_t - mx);
    for (std::size_t i = 0; i < n; ++i)
      g[i * n + j] += std::exp(s[i * n + j] * inv_t - mx) / z;
  }
  double scale = inv_t / (2.0 * static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double delta = i == j ? 2.0 : 0.0;
      g[i * n + j] = (g[i * n + j] - delta) * scale;
    }

  GradPair out;
  out.d_audio.assign(n * d, 0.0);
  out.d_image.assign(n * d, 0.0);
  // dL/dA_hat = G * V_hat ; dL/dV_hat = G^T * A_hat
  std::vector<double> da_hat(n * d, 0.0), dv_hat(n * d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double gij = g[i * n + j];
      for (std::size_t k = 0; k < d; ++k) {
        da_hat[i * d + k] += gij * v[j * d + k];
        dv_hat[j * d + k] += gij * a[i * d + k];
      }
    }
  // through the normalization: dL/dx = (dL/dx_hat - (dL/dx_hat . x_hat) x_hat) / |x|
  for (std::size_t i = 0; i < n; ++i) {
    double dot_a = 0.0, dot_v = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      dot_a += da_hat[i * d + k] * a[i * d + k];
      dot_v += dv_hat[i * d + k] * v[i * d + k];
    }
    for (std::size_t k = 0; k < d; ++k) {
      out.d_audio[i * d + k] =
          (da_hat[i * d + k] - dot_a * a[i * d + k]) / na[i];
      out.d_image[i * d + k] =
          (dv_hat[i * d + k] - dot_v * v[i * d + k]) / nv[i];
    }
  }
  return out;
}

RecallResult retrieval_recall(const BatchPair& batch,
                              const std::vector<std::size_t>& ks) {
  batch.validate();
  const std::size_t n = batch.n, d = batch.d;
  for (std::size_t k : ks)
    if (k < 1 || k > n)
      throw DataError("retrieval_recall: k=" + std::to_string(k) +
                      " out of range for batch size " + std::to_string(n));
  std::vector<double> na, nv;
  auto a = normalize_rows(batch.audio, n, d, &na);
  auto v = normalize_rows(batch.image, n, d, &nv);
  auto s = similarity(a, v, n, d);

  // rank of the diagonal entry in its row / column; equal similarities
  // rank the lower index first
  std::vector<std::size_t> row_rank(n), col_rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    double own = s[i * n + i];
    std::size_t r = 1;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      if (s[i * n + j] > own || (s[i * n + j] == own && j < i)) ++r;
    }
    row_rank[i] = r;
  }
  for (std::size_t j = 0; j < n; ++j) {
    double own = s[j * n + j];
    std::size_t r = 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j) continue;
      if (s[i * n + j] > own || (s[i * n + j] == own && i < j)) ++r;
    }
    col_rank[j] = r;
  }
  RecallResult out;
  for (std::size_t k : ks) {
    std::size_t hit_row = 0, hit_col = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (row_rank[i] <= k) ++hit_row;
      if (col_rank[i] <= k) ++hit_col;
    }
    out.audio_to_image[k] = static_cast<double>(hit_row) / static_cast<double>(n);
    out.image_to_audio[k] = static_cast<double>(hit_col) / static_cast<double>(n);
  }
  return out;
}

}  // namespace zsabx
