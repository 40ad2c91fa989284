// quantize.cpp

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

#include "zsabx/quantize.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "zsabx/common.h"

namespace zsabx {

namespace {

double sq_dist(const double* a, const double* b, std::size_t dim) {
  double s = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// nearest centroid, lowest index on exact ties
std::size_t nearest(const double* p, const Codebook& cb, double* out_d2) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < cb.k; ++j) {
    double d = sq_dist(p, cb.centroid(j), cb.dim);
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  if (out_d2) *out_d2 = best_d;
  return best;
}

}  // namespace

Codebook fit_kmeans(const std::vector<double>& sample, std::size_t n,
                    std::size_t dim, std::size_t k, std::size_t max_iter,
                    double tol, std::int64_t seed) {
  if (k < 1) throw DataError("fit_kmeans: k must be >= 1");
  if (n < k)
    throw DataError("fit_kmeans: sample < k (" + std::to_string(n) + " < " +
                    std::to_string(k) + ")");
  if (sample.size() != n * dim)
    throw ContractError("fit_kmeans: sample size mismatch");
  for (double v : sample)
    if (!std::isfinite(v)) throw DataError("fit_kmeans: non-finite input");

  Codebook cb;
  cb.k = k;
  cb.dim = dim;
  cb.seed = seed;
  cb.centroids.resize(k * dim);
  auto point = [&](std::size_t i) { return sample.data() + i * dim; };

  // k-means++ seeding
  Rng rng(static_cast<std::uint64_t>(seed));
  std::size_t first = rng.next_below(n);
  std::memcpy(cb.centroids.data(), point(first), dim * sizeof(double));
  std::vector<double> min_d2(n);
  for (std::size_t i = 0; i < n; ++i)
    min_d2[i] = sq_dist(point(i), cb.centroids.data(), dim);
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += min_d2[i];
    std::size_t chosen;
    if (total <= 0.0) {
      // all points coincide with existing centroids
      chosen = rng.next_below(n);
    } else {
      double r = rng.next_double() * total;
      double acc = 0.0;
      chosen = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += min_d2[i];
        if (acc >= r) {
          chosen = i;
          break;
        }
      }
    }
    double* dst = cb.centroids.data() + c * dim;
    std::memcpy(dst, point(chosen), dim * sizeof(double));
    for (std::size_t i = 0; i < n; ++i) {
      double d = sq_dist(point(i), dst, dim);
      if (d < min_d2[i]) min_d2[i] = d;
    }
  }

  // Lloyd
  std::vector<std::size_t> assign(n);
  std::vector<double> sums(k * dim);
  std::vector<std::size_t> counts(k);
  double prev_inertia = std::numeric_limits<double>::infinity();
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double d2;
      assign[i] = nearest(point(i), cb, &d2);
      inertia += d2;
    }
    cb.inertia_trace.push_back(inertia);
    cb.inertia = inertia;
    cb.iterations_run = iter + 1;

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      double* s = sums.data() + assign[i] * dim;
      const double* p = point(i);
      for (std::size_t d = 0; d < dim; ++d) s[d] += p[d];
      ++counts[assign[i]];
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (counts[j] == 0) {
        // reseed to the point farthest from its current centroid
        std::size_t far_i = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          double d = sq_dist(point(i), cb.centroid(assign[i]), dim);
          if (d > far_d) {
            far_d = d;
            far_i = i;
          }
        }
        std::memcpy(cb.centroids.data() + j * dim, point(far_i),
                    dim * sizeof(double));
        continue;
      }
      double* c = cb.centroids.data() + j * dim;
      for (std::size_t d = 0; d < dim; ++d)
        c[d] = sums[j * dim + d] / static_cast<double>(counts[j]);
    }

    if (prev_inertia < std::numeric_limits<double>::infinity()) {
      double rel = prev_inertia > 0.0
                       ? (prev_inertia - inertia) / prev_inertia
                       : 0.0;
      if (rel < tol) break;
    }
    prev_inertia = inertia;
  }

  // final inertia against the final centroids
  double inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d2;
    nearest(point(i), cb, &d2);
    inertia += d2;
  }
  cb.inertia = inertia;
  return cb;
}

UnitSequence assign_units(const FeatureMatrix& m, const Codebook& cb) {
  if (m.dim != cb.dim)
    throw DataError("assign_units: dim mismatch (" + std::to_string(m.dim) +
                    " vs codebook " + std::to_string(cb.dim) + ")");
  UnitSequence u;
  u.utterance_id = m.utterance_id;
  u.units.resize(m.frames);
  for (std::size_t i = 0; i < m.frames; ++i)
    u.units[i] = static_cast<std::uint32_t>(nearest(m.row(i), cb, nullptr));
  return u;
}

FeatureMatrix units_to_features(const UnitSequence& u, const Codebook& cb,
                                UnitEncoding encoding, double frame_rate) {
  FeatureMatrix m;
  m.utterance_id = u.utterance_id;
  m.frames = u.units.size();
  m.frame_rate = frame_rate;
  m.dim = encoding == UnitEncoding::kOneHot ? cb.k : cb.dim;
  m.data.assign(m.frames * m.dim, 0.0);
  for (std::size_t i = 0; i < u.units.size(); ++i) {
    std::uint32_t unit = u.units[i];
    if (unit >= cb.k)
      throw DataError("unit " + std::to_string(unit) + " out of range for k=" +
                      std::to_string(cb.k));
    if (encoding == UnitEncoding::kOneHot) {
      m.data[i * m.dim + unit] = 1.0;
    } else {
      std::memcpy(m.data.data() + i * m.dim, cb.centroid(unit),
                  cb.dim * sizeof(double));
    }
  }
  return m;
}

namespace {

constexpr char kCodebookMagic[4] = {'K', 'M', 'B', '1'};
constexpr std::uint32_t kCodebookVersion = 1;

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

void save_codebook(const std::filesystem::path& path, const Codebook& cb) {
  std::string buf;
  buf.append(kCodebookMagic, 4);
  put_u32(buf, kCodebookVersion);
  put_u32(buf, static_cast<std::uint32_t>(cb.k));
  put_u32(buf, static_cast<std::uint32_t>(cb.dim));
  put_u64(buf, static_cast<std::uint64_t>(cb.seed));
  std::uint64_t bits;
  std::memcpy(&bits, &cb.inertia, 8);
  put_u64(buf, bits);
  for (double v : cb.centroids) {
    float f = static_cast<float>(v);
    std::uint32_t fb;
    std::memcpy(&fb, &f, 4);
    put_u32(buf, fb);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write codebook: " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw DataError("codebook write failed: " + path.string());
}

Codebook load_codebook(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open codebook: " + path.string());
  std::string raw((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  if (raw.size() < 32) throw DataError("truncated codebook: " + path.string());
  const unsigned char* p = reinterpret_cast<const unsigned char*>(raw.data());
  if (std::memcmp(p, kCodebookMagic, 4) != 0)
    throw DataError("bad magic in codebook: " + path.string());
  if (get_u32(p + 4) != kCodebookVersion)
    throw DataError("unsupported codebook version: " + path.string());
  Codebook cb;
  cb.k = get_u32(p + 8);
  cb.dim = get_u32(p + 12);
  cb.seed = static_cast<std::int64_t>(get_u64(p + 16));
  std::uint64_t bits = get_u64(p + 24);
  std::memcpy(&cb.inertia, &bits, 8);
  std::size_t payload = cb.k * cb.dim * 4;
  if (raw.size() != 32 + payload)
    throw DataError("truncated codebook payload: " + path.string());
  cb.centroids.resize(cb.k * cb.dim);
  for (std::size_t i = 0; i < cb.centroids.size(); ++i) {
    std::uint32_t fb = get_u32(p + 32 + i * 4);
    float f;
    std::memcpy(&f, &fb, 4);
    cb.centroids[i] = static_cast<double>(f);
  }
  return cb;
}

std::string format_unit_sequence(const UnitSequence& u) {
  std::string out = u.utterance_id;
  for (std::uint32_t unit : u.units) {
    out += ' ';
    out += std::to_string(unit);
  }
  return out;
}

}  // namespace zsabx
