// zsabx/common.h

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

#ifndef ZSABX_COMMON_H_
#define ZSABX_COMMON_H_

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace zsabx {

// Bad input data (malformed files, inconsistent metadata, invariant
// violations in user-supplied values). Maps to exit code 2 in the CLI.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke an API precondition. Maps to exit code 3 in the CLI.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Deterministic splittable RNG used everywhere randomness is needed.
// splitmix64 for seeding / stream splitting, xoshiro-style output via
// a small counter-free generator. Self-contained so that byte-identical
// output does not depend on the standard library's distribution
// implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // warm up so that small seeds diverge immediately
    next_u64();
    next_u64();
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform integer in [0, n)
  std::uint64_t next_below(std::uint64_t n) {
    // modulo bias is negligible for n << 2^64 and irrelevant for fixtures,
    // but rejection sampling keeps it exact
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % n;
  }

  // standard normal via Box-Muller (deterministic, libc-independent)
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1, u2;
    do {
      u1 = next_double();
    } while (u1 <= 0.0);
    u2 = next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // derive an independent stream, e.g. per cell or per utterance
  Rng split(std::uint64_t salt) const {
    Rng child(state_ ^ (salt * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
    return child;
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Round-half-up to two decimals. The 1e-9 nudge keeps values whose decimal
// form is exactly *.xx5 (stored as the nearest binary64, often just below)
// rounding up, e.g. (5.86 + 6.81) / 2 -> 6.34, not 6.33.
inline double round2(double v) {
  return std::floor(v * 100.0 + 0.5 + 1e-9) / 100.0;
}

// Percent formatting used in all reports: two decimals, round-half-up.
inline std::string format_percent2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", round2(v));
  return buf;
}

// FNV-1a, used to salt per-key RNG streams so sampling does not depend on
// enumeration order.
inline std::uint64_t hash_string(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace zsabx

#endif  // ZSABX_COMMON_H_
