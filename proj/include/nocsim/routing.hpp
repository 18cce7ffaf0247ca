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

#include <array>
#include <string>
#include <string_view>

#include "nocsim/common.hpp"
#include "nocsim/mesh.hpp"

namespace nocsim {

/// The four routing algorithms, indexable 0..3 (the action space).
enum class RoutingAlgorithm : int {
  XY = 0,
  RandomMinimal = 1,
  ObliviousNorthLast = 2,
  AdaptiveNorthLast = 3,
};

inline constexpr int kRoutingAlgorithmCount = 4;

inline constexpr const char* name(RoutingAlgorithm a) {
  switch (a) {
    case RoutingAlgorithm::XY: return "xy";
    case RoutingAlgorithm::RandomMinimal: return "random_minimal";
    case RoutingAlgorithm::ObliviousNorthLast: return "oblivious_north_last";
    case RoutingAlgorithm::AdaptiveNorthLast: return "adaptive_north_last";
  }
  return "?";
}

inline RoutingAlgorithm parse_routing_algorithm(std::string_view s) {
  for (int i = 0; i < kRoutingAlgorithmCount; ++i) {
    const auto a = static_cast<RoutingAlgorithm>(i);
    if (s == name(a)) return a;
  }
  throw ConfigError("unknown routing algorithm: " + std::string(s));
}

/// Up to four output choices, in order. Callers sample uniformly when more
/// than one is returned.
struct RouteCandidates {
  std::array<Direction, kMeshPorts> dirs{};
  int count = 0;

  void push(Direction d) { dirs[static_cast<std::size_t>(count++)] = d; }
  bool contains(Direction d) const {
    for (int i = 0; i < count; ++i)
      if (dirs[static_cast<std::size_t>(i)] == d) return true;
    return false;
  }
  const Direction* begin() const { return dirs.data(); }
  const Direction* end() const { return dirs.data() + count; }
};

/// Free downstream VCs per mesh direction, indexed by Direction.
using FreeVcCounts = std::array<int, kMeshPorts>;

/// Productive (minimal-quadrant) output directions permitted by the
/// algorithm. XY and AdaptiveNorthLast return exactly one direction; the
/// north-last variants never offer North while another productive direction
/// exists, which breaks the cyclic channel dependencies that deadlock
/// unrestricted minimal routing.
inline RouteCandidates route_candidates(RoutingAlgorithm alg, Coord cur, Coord dst,
                                        const FreeVcCounts& downstream_free_vcs) {
  if (cur == dst) throw ContractError("route_candidates: already at destination");

  RouteCandidates productive;
  if (dst.x != cur.x)
    productive.push(dst.x > cur.x ? Direction::East : Direction::West);
  if (dst.y != cur.y)
    productive.push(dst.y > cur.y ? Direction::North : Direction::South);

  switch (alg) {
    case RoutingAlgorithm::XY: {
      RouteCandidates out;
      out.push(productive.dirs[0]);  // x direction first
      return out;
    }
    case RoutingAlgorithm::RandomMinimal:
      return productive;
    case RoutingAlgorithm::ObliviousNorthLast:
    case RoutingAlgorithm::AdaptiveNorthLast: {
      RouteCandidates allowed;
      for (Direction d : productive)
        if (d != Direction::North) allowed.push(d);
      if (allowed.count == 0) allowed.push(Direction::North);
      if (alg == RoutingAlgorithm::ObliviousNorthLast) return allowed;
      // Adaptive: most free downstream VCs, ties in E, W, S, N order.
      constexpr std::array<Direction, 4> tie_order{Direction::East, Direction::West,
                                                   Direction::South, Direction::North};
      Direction best = allowed.dirs[0];
      int best_free = -1;
      for (Direction d : tie_order) {
        if (!allowed.contains(d)) continue;
        const int free = downstream_free_vcs[static_cast<std::size_t>(d)];
        if (free > best_free) {
          best = d;
          best_free = free;
        }
      }
      RouteCandidates out;
      out.push(best);
      return out;
    }
  }
  throw ContractError("route_candidates: bad algorithm");
}

}  // namespace nocsim
