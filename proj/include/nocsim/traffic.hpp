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

#include <string>
#include <string_view>

#include "nocsim/common.hpp"
#include "nocsim/mesh.hpp"
#include "nocsim/rng.hpp"

namespace nocsim {

/// The seven synthetic traffic patterns.
enum class TrafficPattern : int {
  UniformRandom = 0,
  Tornado = 1,
  BitReverse = 2,
  BitRotation = 3,
  Shuffle = 4,
  Transpose = 5,
  Neighbor = 6,
};

inline constexpr int kTrafficPatternCount = 7;

inline constexpr const char* name(TrafficPattern p) {
  switch (p) {
    case TrafficPattern::UniformRandom: return "uniform_random";
    case TrafficPattern::Tornado: return "tornado";
    case TrafficPattern::BitReverse: return "bit_reverse";
    case TrafficPattern::BitRotation: return "bit_rotation";
    case TrafficPattern::Shuffle: return "shuffle";
    case TrafficPattern::Transpose: return "transpose";
    case TrafficPattern::Neighbor: return "neighbor";
  }
  return "?";
}

inline TrafficPattern parse_traffic_pattern(std::string_view s) {
  for (int i = 0; i < kTrafficPatternCount; ++i) {
    const auto p = static_cast<TrafficPattern>(i);
    if (s == name(p)) return p;
  }
  throw ConfigError("unknown traffic pattern: " + std::string(s));
}

/// A destination function bound to a mesh size.
struct TrafficSpec {
  TrafficPattern pattern = TrafficPattern::UniformRandom;
  int mesh_radix = 8;
};

namespace detail {

inline constexpr bool is_pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }

inline constexpr int log2i(int v) {
  int b = 0;
  while ((1 << b) < v) ++b;
  return b;
}

inline constexpr int reverse_bits(int v, int bits) {
  int r = 0;
  for (int i = 0; i < bits; ++i)
    if (v & (1 << i)) r |= 1 << (bits - 1 - i);
  return r;
}

inline constexpr int rotl_bits(int v, int bits) {
  const int mask = (1 << bits) - 1;
  return ((v << 1) | (v >> (bits - 1))) & mask;
}

inline constexpr int rotr_bits(int v, int bits) {
  const int mask = (1 << bits) - 1;
  return ((v >> 1) | (v << (bits - 1))) & mask;
}

}  // namespace detail

/// Raw destination formula for the deterministic patterns. May return src
/// (a fixed point); dest_for() is the user-facing function that rerolls
/// fixed points. UniformRandom has no formula and is not accepted here.
inline int pattern_dest(const TrafficSpec& spec, int src) {
  const int k = spec.mesh_radix;
  const int n = k * k;
  if (src < 0 || src >= n) throw ContractError("pattern_dest: src out of range");
  switch (spec.pattern) {
    case TrafficPattern::UniformRandom:
      throw ContractError("pattern_dest: uniform_random has no formula");
    case TrafficPattern::Tornado: {
      const int off = (k + 1) / 2 - 1;  // ceil(k/2) - 1
      const Coord c = coord_of(src, k);
      return node_id(Coord{(c.x + off) % k, (c.y + off) % k}, k);
    }
    case TrafficPattern::BitReverse:
    case TrafficPattern::BitRotation:
    case TrafficPattern::Shuffle: {
      if (!detail::is_pow2(k))
        throw ConfigError("bit-pattern traffic requires a power-of-two mesh radix");
      const int bits = detail::log2i(n);
      if (spec.pattern == TrafficPattern::BitReverse)
        return detail::reverse_bits(src, bits);
      if (spec.pattern == TrafficPattern::Shuffle)
        return detail::rotl_bits(src, bits);
      return detail::rotr_bits(src, bits);
    }
    case TrafficPattern::Transpose: {
      const Coord c = coord_of(src, k);
      return node_id(Coord{c.y, c.x}, k);
    }
    case TrafficPattern::Neighbor: {
      const Coord c = coord_of(src, k);
      return node_id(Coord{(c.x + 1) % k, c.y}, k);
    }
  }
  throw ContractError("pattern_dest: bad pattern");
}

/// Destination for a packet from src. Deterministic for all patterns except
/// UniformRandom; fixed points of the permutation patterns fall back to a
/// uniform draw so traffic never targets its own source.
inline int dest_for(const TrafficSpec& spec, int src, Rng& rng) {
  const int n = spec.mesh_radix * spec.mesh_radix;
  if (src < 0 || src >= n) throw ContractError("dest_for: src out of range");
  if (spec.pattern != TrafficPattern::UniformRandom) {
    const int d = pattern_dest(spec, src);
    if (d != src) return d;
  }
  // Uniform over the n-1 nodes other than src.
  int d = static_cast<int>(rng.next_below(static_cast<std::uint32_t>(n - 1)));
  if (d >= src) ++d;
  return d;
}

/// Bernoulli packet-start trial. rate is the offered flit load per node per
/// cycle, so a packet of packet_length flits starts with probability
/// rate / packet_length.
inline bool should_inject(double rate, int packet_length, Rng& rng) {
  if (!(rate >= 0.0 && rate <= 1.0))
    throw ContractError("should_inject: rate must be in [0, 1]");
  if (packet_length < 1)
    throw ContractError("should_inject: packet_length must be >= 1");
  return rng.next_bernoulli(rate / packet_length);
}

}  // namespace nocsim
