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
#include <cstdint>
#include <cstdlib>

#include "nocsim/common.hpp"

namespace nocsim {

/// Router port directions. North is +y and East is +x; Local is the
/// injection/ejection port. N,E,S,W is the canonical port order used by
/// buffer configurations.
enum class Direction : std::uint8_t {
  North = 0,
  East = 1,
  South = 2,
  West = 3,
  Local = 4,
};

inline constexpr int kMeshPorts = 4;  // N, E, S, W
inline constexpr int kPorts = 5;      // mesh ports plus Local
inline constexpr int kLocalPort = 4;

inline constexpr std::array<Direction, kMeshPorts> kMeshDirections{
    Direction::North, Direction::East, Direction::South, Direction::West};

inline constexpr const char* name(Direction d) {
  switch (d) {
    case Direction::North: return "north";
    case Direction::East: return "east";
    case Direction::South: return "south";
    case Direction::West: return "west";
    case Direction::Local: return "local";
  }
  return "?";
}

inline constexpr Direction opposite(Direction d) {
  switch (d) {
    case Direction::North: return Direction::South;
    case Direction::East: return Direction::West;
    case Direction::South: return Direction::North;
    case Direction::West: return Direction::East;
    case Direction::Local: return Direction::Local;
  }
  return Direction::Local;
}

/// Position in a k-ary 2-mesh. Node id = y*k + x.
struct Coord {
  int x = 0;
  int y = 0;
  friend constexpr bool operator==(const Coord&, const Coord&) = default;
};

inline constexpr int node_id(Coord c, int k) { return c.y * k + c.x; }

inline constexpr Coord coord_of(int id, int k) { return Coord{id % k, id / k}; }

inline constexpr bool in_mesh(Coord c, int k) {
  return c.x >= 0 && c.x < k && c.y >= 0 && c.y < k;
}

inline constexpr Coord step_toward(Coord c, Direction d) {
  switch (d) {
    case Direction::North: return Coord{c.x, c.y + 1};
    case Direction::East: return Coord{c.x + 1, c.y};
    case Direction::South: return Coord{c.x, c.y - 1};
    case Direction::West: return Coord{c.x - 1, c.y};
    case Direction::Local: return c;
  }
  return c;
}

inline int manhattan(Coord a, Coord b) {
  return std::abs(a.x - b.x) + std::abs(a.y - b.y);
}

}  // namespace nocsim
