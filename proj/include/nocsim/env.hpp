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

#include <limits>
#include <utility>
#include <vector>

#include "nocsim/common.hpp"
#include "nocsim/network.hpp"
#include "nocsim/rng.hpp"
#include "nocsim/routing.hpp"
#include "nocsim/sim_config.hpp"
#include "nocsim/stats.hpp"
#include "nocsim/traffic.hpp"

namespace nocsim {

/// Network statistics handed back to the agent after each step.
struct Observation {
  std::int64_t injected_flits = 0;
  std::int64_t received_flits = 0;
  double avg_latency = 0.0;  // 0 when nothing was received
};

using StateId = int;
using ActionId = int;

struct StepResult {
  StateId next_state = 0;
  double reward = 0.0;
  bool done = false;
  bool info = false;  // reward >= configured threshold
  Observation observation;
};

enum class RewardMetric { Throughput, NegLatency };

/// Episodic environment over the mesh simulator. States are discrete phase
/// indices; each step configures a fresh network for the current phase,
/// runs one warmup+measure window under the chosen routing algorithm and
/// rewards the agent with the window's utility.
///
/// Case 1 sweeps the injection rate 0.1..0.9 over nine phases; Case 2 runs
/// seven traffic patterns at a fixed rate. Per-phase seeds derive from
/// (master seed, episode index, phase index), so phases and episodes are
/// decorrelated but reproducible.
class MeshEnv {
 public:
  struct Phase {
    double rate = 0.0;
    TrafficSpec traffic;
  };

  static MeshEnv make_case1(const SimConfig& sim, const TrafficSpec& traffic,
                            double reward_threshold = std::numeric_limits<double>::infinity(),
                            RewardMetric metric = RewardMetric::Throughput) {
    sim.validate();
    if (traffic.mesh_radix != sim.mesh_radix)
      throw ConfigError("make_case1: traffic mesh_radix mismatch");
    std::vector<Phase> phases;
    for (int r = 0; r < 9; ++r)
      phases.push_back(Phase{0.1 * (r + 1), traffic});
    return MeshEnv(sim, std::move(phases), reward_threshold, metric);
  }

  static MeshEnv make_case2(const SimConfig& sim, double rate,
                            const std::vector<TrafficSpec>& pattern_sequence,
                            double reward_threshold = std::numeric_limits<double>::infinity(),
                            RewardMetric metric = RewardMetric::Throughput) {
    sim.validate();
    if (pattern_sequence.size() != 7)
      throw ConfigError("make_case2: pattern sequence must have exactly 7 entries");
    if (!(rate >= 0.0 && rate <= 1.0))
      throw ConfigError("make_case2: rate must be in [0, 1]");
    std::vector<Phase> phases;
    for (const TrafficSpec& t : pattern_sequence) {
      if (t.mesh_radix != sim.mesh_radix)
        throw ConfigError("make_case2: traffic mesh_radix mismatch");
      phases.push_back(Phase{rate, t});
    }
    return MeshEnv(sim, std::move(phases), reward_threshold, metric);
  }

  int state_count() const { return static_cast<int>(phases_.size()); }
  static constexpr int action_count() { return kRoutingAlgorithmCount; }
  const Phase& phase(int i) const {
    if (i < 0 || i >= state_count()) throw ContractError("phase index out of range");
    return phases_[static_cast<std::size_t>(i)];
  }
  std::uint64_t master_seed() const { return sim_.rng_seed; }
  const SimConfig& sim_config() const { return sim_; }
  double reward_threshold() const { return threshold_; }

  /// Starts a new episode at phase 0 with a zeroed observation.
  std::pair<StateId, Observation> reset() {
    ++episode_;
    phase_ = 0;
    started_ = true;
    return {0, Observation{}};
  }

  StepResult step(ActionId action) {
    if (!started_) throw ContractError("step: reset() the environment first");
    if (phase_ >= state_count()) throw EpisodeDoneError("step: episode is complete");
    if (action < 0 || action >= action_count())
      throw ContractError("step: action out of range");

    const WindowStats st = evaluate_phase(
        phase_, static_cast<RoutingAlgorithm>(action), static_cast<std::uint64_t>(episode_));
    StepResult res;
    res.reward = reward_from(st);
    res.observation = Observation{st.flits_injected, st.flits_received,
                                  st.packets_received > 0 ? avg_latency(st) : 0.0};
    ++phase_;
    res.next_state = phase_;
    res.done = phase_ == state_count();
    res.info = res.reward >= threshold_;
    return res;
  }

  /// Runs one phase with a fixed algorithm on an explicit episode stream.
  /// Baseline sweeps use this so fixed-algorithm comparisons see exactly
  /// the seeds the agent saw.
  WindowStats evaluate_phase(int phase, RoutingAlgorithm alg,
                             std::uint64_t episode_index) const {
    const Phase& ph = this->phase(phase);
    SimConfig cfg = sim_;
    cfg.rng_seed = derive_seed(sim_.rng_seed, episode_index,
                               static_cast<std::uint64_t>(phase));
    NetworkState net = build_network(cfg);
    net.set_routing(alg);
    return net.run_window(ph.traffic, ph.rate);
  }

  double reward_from(const WindowStats& st) const {
    if (metric_ == RewardMetric::Throughput) return throughput(st);
    if (st.packets_received > 0) return -avg_latency(st);
    // Nothing delivered: worse than any real latency in the window.
    return -static_cast<double>(sim_.warmup_cycles + sim_.measure_cycles);
  }

 private:
  MeshEnv(const SimConfig& sim, std::vector<Phase> phases, double threshold,
          RewardMetric metric)
      : sim_(sim), phases_(std::move(phases)), threshold_(threshold), metric_(metric) {}

  SimConfig sim_;
  std::vector<Phase> phases_;
  double threshold_;
  RewardMetric metric_;
  std::int64_t episode_ = -1;
  int phase_ = 0;
  bool started_ = false;
};

}  // namespace nocsim
