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

#include "doctest.h"
#include "nocsim/routing.hpp"

using namespace nocsim;

namespace {
FreeVcCounts no_vcs() { return FreeVcCounts{}; }

FreeVcCounts vcs(int n, int e, int s, int w) {
  FreeVcCounts f{};
  f[static_cast<std::size_t>(Direction::North)] = n;
  f[static_cast<std::size_t>(Direction::East)] = e;
  f[static_cast<std::size_t>(Direction::South)] = s;
  f[static_cast<std::size_t>(Direction::West)] = w;
  return f;
}
}  // namespace

TEST_CASE("xy picks the x dimension first") {
  const auto c = route_candidates(RoutingAlgorithm::XY, {2, 3}, {5, 3}, no_vcs());
  REQUIRE(c.count == 1);
  CHECK(c.dirs[0] == Direction::East);

  const auto c2 = route_candidates(RoutingAlgorithm::XY, {5, 1}, {2, 7}, no_vcs());
  REQUIRE(c2.count == 1);
  CHECK(c2.dirs[0] == Direction::West);

  const auto c3 = route_candidates(RoutingAlgorithm::XY, {5, 1}, {5, 7}, no_vcs());
  REQUIRE(c3.count == 1);
  CHECK(c3.dirs[0] == Direction::North);
}

TEST_CASE("random minimal returns every productive direction") {
  const auto c =
      route_candidates(RoutingAlgorithm::RandomMinimal, {2, 3}, {4, 1}, no_vcs());
  REQUIRE(c.count == 2);
  CHECK(c.contains(Direction::East));
  CHECK(c.contains(Direction::South));

  const auto c1 =
      route_candidates(RoutingAlgorithm::RandomMinimal, {2, 3}, {2, 5}, no_vcs());
  REQUIRE(c1.count == 1);
  CHECK(c1.dirs[0] == Direction::North);
}

TEST_CASE("oblivious north-last suppresses north while another choice exists") {
  // productive {East, North} -> [East]
  const auto c = route_candidates(RoutingAlgorithm::ObliviousNorthLast, {2, 3},
                                  {4, 5}, no_vcs());
  REQUIRE(c.count == 1);
  CHECK(c.dirs[0] == Direction::East);

  // pure-north remainder is the only case that offers North
  const auto c2 = route_candidates(RoutingAlgorithm::ObliviousNorthLast, {4, 3},
                                   {4, 5}, no_vcs());
  REQUIRE(c2.count == 1);
  CHECK(c2.dirs[0] == Direction::North);

  // southbound pairs keep both choices
  const auto c3 = route_candidates(RoutingAlgorithm::ObliviousNorthLast, {4, 3},
                                   {2, 1}, no_vcs());
  REQUIRE(c3.count == 2);
  CHECK(c3.contains(Direction::West));
  CHECK(c3.contains(Direction::South));
}

TEST_CASE("adaptive north-last maximizes free downstream VCs") {
  // allowed {East, South}, free E=2 S=3 -> South
  const auto c = route_candidates(RoutingAlgorithm::AdaptiveNorthLast, {2, 3},
                                  {4, 1}, vcs(0, 2, 3, 0));
  REQUIRE(c.count == 1);
  CHECK(c.dirs[0] == Direction::South);

  // ties break in E, W, S, N order
  const auto c2 = route_candidates(RoutingAlgorithm::AdaptiveNorthLast, {2, 3},
                                   {4, 1}, vcs(0, 3, 3, 0));
  REQUIRE(c2.count == 1);
  CHECK(c2.dirs[0] == Direction::East);

  // north stays last even with more free VCs there
  const auto c3 = route_candidates(RoutingAlgorithm::AdaptiveNorthLast, {2, 3},
                                   {4, 5}, vcs(9, 1, 0, 0));
  REQUIRE(c3.count == 1);
  CHECK(c3.dirs[0] == Direction::East);
}

TEST_CASE("routing at the destination is a contract violation") {
  CHECK_THROWS_AS(route_candidates(RoutingAlgorithm::XY, {2, 3}, {2, 3}, no_vcs()),
                  ContractError);
}

TEST_CASE("candidates are always productive") {
  const Coord dst{4, 4};
  for (int alg = 0; alg < kRoutingAlgorithmCount; ++alg) {
    for (int x = 0; x < 8; ++x) {
      for (int y = 0; y < 8; ++y) {
        const Coord cur{x, y};
        if (cur == dst) continue;
        const auto c = route_candidates(static_cast<RoutingAlgorithm>(alg), cur, dst,
                                        vcs(1, 1, 1, 1));
        REQUIRE(c.count >= 1);
        for (const Direction d : c) {
          const Coord next = step_toward(cur, d);
          CHECK(manhattan(next, dst) == manhattan(cur, dst) - 1);
        }
      }
    }
  }
}

TEST_CASE("algorithm names round-trip") {
  for (int i = 0; i < kRoutingAlgorithmCount; ++i) {
    const auto a = static_cast<RoutingAlgorithm>(i);
    CHECK(parse_routing_algorithm(name(a)) == a);
  }
  CHECK_THROWS_AS(parse_routing_algorithm("west_first"), ConfigError);
}
