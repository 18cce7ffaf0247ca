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

#include <vector>

#include "doctest.h"
#include "nocsim/env.hpp"
#include "nocsim/rl.hpp"

using namespace nocsim;

namespace {

SimConfig env_sim(std::uint64_t seed = 5) {
  SimConfig cfg;
  cfg.mesh_radix = 4;
  cfg.warmup_cycles = 100;
  cfg.measure_cycles = 800;
  cfg.rng_seed = seed;
  return cfg;
}

TrafficSpec uniform4() { return TrafficSpec{TrafficPattern::UniformRandom, 4}; }

std::vector<TrafficSpec> default_sequence() {
  std::vector<TrafficSpec> seq;
  for (int i = 0; i < kTrafficPatternCount; ++i)
    seq.push_back(TrafficSpec{static_cast<TrafficPattern>(i), 4});
  return seq;
}

}  // namespace

TEST_CASE("case 1 sweeps rates 0.1 through 0.9 over nine states") {
  auto env = MeshEnv::make_case1(env_sim(), uniform4());
  CHECK(env.state_count() == 9);
  CHECK(env.phase(0).rate == doctest::Approx(0.1));
  CHECK(env.phase(8).rate == doctest::Approx(0.9));
  CHECK(MeshEnv::action_count() == 4);
}

TEST_CASE("case 2 runs seven patterns at one rate") {
  auto env = MeshEnv::make_case2(env_sim(), 0.5, default_sequence());
  CHECK(env.state_count() == 7);
  for (int s = 0; s < 7; ++s) CHECK(env.phase(s).rate == doctest::Approx(0.5));
  CHECK(env.phase(0).traffic.pattern == TrafficPattern::UniformRandom);

  auto bad = default_sequence();
  bad.pop_back();
  CHECK_THROWS_AS(MeshEnv::make_case2(env_sim(), 0.5, bad), ConfigError);
  CHECK_THROWS_AS(MeshEnv::make_case2(env_sim(), 1.5, default_sequence()), ConfigError);
}

TEST_CASE("episodes end exactly once, after every phase") {
  auto env = MeshEnv::make_case1(env_sim(), uniform4());
  auto [s0, obs0] = env.reset();
  CHECK(s0 == 0);
  CHECK(obs0.injected_flits == 0);
  CHECK(obs0.received_flits == 0);
  int done_count = 0;
  for (int t = 0; t < 9; ++t) {
    const auto res = env.step(0);
    if (res.done) ++done_count;
    if (t < 8)
      CHECK(res.next_state == t + 1);
    else
      CHECK(res.done);
    // received can exceed injected only by the warmup carryover still
    // resident at window start, which network capacity bounds
    const std::int64_t capacity_bound = 4 * 4 * kPorts * 4 * 4 + 64;
    CHECK(res.observation.received_flits <=
          res.observation.injected_flits + capacity_bound);
  }
  CHECK(done_count == 1);
  CHECK_THROWS_AS(env.step(0), EpisodeDoneError);
  // reset starts over
  auto [s1, obs1] = env.reset();
  CHECK(s1 == 0);
}

TEST_CASE("reward is exactly the window throughput") {
  auto env = MeshEnv::make_case1(env_sim(11), uniform4());
  env.reset();
  const auto res = env.step(static_cast<int>(RoutingAlgorithm::XY));
  const auto expect =
      env.evaluate_phase(0, RoutingAlgorithm::XY, /*episode_index=*/0);
  CHECK(res.reward == throughput(expect));  // bitwise, not approximately
  CHECK(res.reward > 0.0);
  CHECK_FALSE(expect.deadlock);  // xy at the lowest rate runs clean
}

TEST_CASE("same master seed and actions reproduce the trajectory") {
  auto a = MeshEnv::make_case2(env_sim(21), 0.3, default_sequence());
  auto b = MeshEnv::make_case2(env_sim(21), 0.3, default_sequence());
  a.reset();
  b.reset();
  for (int t = 0; t < 7; ++t) {
    const auto ra = a.step(t % 4);
    const auto rb = b.step(t % 4);
    CHECK(ra.reward == rb.reward);
    CHECK(ra.observation.injected_flits == rb.observation.injected_flits);
  }
}

TEST_CASE("distinct episodes and phases use decorrelated seeds") {
  auto env = MeshEnv::make_case1(env_sim(31), uniform4());
  env.reset();
  const double r_ep0 = env.step(0).reward;
  env.reset();
  const double r_ep1 = env.step(0).reward;
  CHECK(r_ep0 != r_ep1);  // different episode streams
  // but each is reproducible through evaluate_phase
  CHECK(r_ep0 == throughput(env.evaluate_phase(0, RoutingAlgorithm::XY, 0)));
  CHECK(r_ep1 == throughput(env.evaluate_phase(0, RoutingAlgorithm::XY, 1)));
}

TEST_CASE("info thresholds the reward") {
  auto env = MeshEnv::make_case1(env_sim(), uniform4(), /*reward_threshold=*/0.0);
  env.reset();
  CHECK(env.step(0).info);  // any positive reward passes a zero threshold

  auto inf_env = MeshEnv::make_case1(env_sim(), uniform4());
  inf_env.reset();
  CHECK_FALSE(inf_env.step(0).info);  // +inf threshold: info always false
}

TEST_CASE("stepping requires reset and a valid action") {
  auto env = MeshEnv::make_case1(env_sim(), uniform4());
  CHECK_THROWS_AS(env.step(0), ContractError);
  env.reset();
  CHECK_THROWS_AS(env.step(4), ContractError);
  CHECK_THROWS_AS(env.step(-1), ContractError);
}

TEST_CASE("environment operations leave agent state alone") {
  rl::QTable table(9, 4);
  table.at(3, 2) = 1.25;
  const rl::QTable before = table;
  auto env = MeshEnv::make_case1(env_sim(), uniform4());
  env.reset();
  env.step(1);
  env.reset();
  CHECK(table == before);
}

TEST_CASE("negative-latency reward flips the sign of the mean latency") {
  auto env = MeshEnv::make_case1(env_sim(41), uniform4(),
                                 std::numeric_limits<double>::infinity(),
                                 RewardMetric::NegLatency);
  env.reset();
  const auto res = env.step(0);
  CHECK(res.reward < 0.0);
  CHECK(res.reward == -res.observation.avg_latency);
}
