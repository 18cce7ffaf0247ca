/*
 * Copyright 2026 The nocsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cmath>
#include <cstdint>

#include "nocsim/common.hpp"

namespace nocsim {

/// splitmix64 finalizer. Also the building block for seed derivation.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Derives a decorrelated child seed from a master seed and up to three
/// stream indices, so episodes, phases and repetitions get their own
/// reproducible random streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t s0,
                                 std::uint64_t s1 = 0, std::uint64_t s2 = 0) {
  std::uint64_t h = mix64(master);
  h = mix64(h ^ s0);
  h = mix64(h ^ s1);
  h = mix64(h ^ s2);
  return h;
}

/// Deterministic 64-bit PRNG (splitmix64). Distributions are implemented
/// here rather than with <random> so streams are bit-identical across
/// platforms and standard-library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 1) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n). n must be positive.
  std::uint32_t next_below(std::uint32_t n) {
    if (n == 0) throw ContractError("Rng::next_below: n must be positive");
    return static_cast<std::uint32_t>(next_u64() % n);
  }

  bool next_bernoulli(double p) { return next_double() < p; }

  /// Standard normal deviate (Marsaglia polar method, cached spare).
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * next_double() - 1.0;
      v = 2.0 * next_double() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace nocsim
