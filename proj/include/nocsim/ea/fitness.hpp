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

#include "nocsim/common.hpp"
#include "nocsim/ea/decode.hpp"
#include "nocsim/network.hpp"
#include "nocsim/routing.hpp"
#include "nocsim/sim_config.hpp"
#include "nocsim/stats.hpp"
#include "nocsim/traffic.hpp"

namespace nocsim::ea {

/// Simulation-backed fitness of a buffer-configuration genome: decode to a
/// VC allocation, build the network and return one window's throughput.
/// Deterministic for a fixed sim seed; an infeasible budget yields -inf so
/// the candidate ranks worst.
inline double fitness_vc(const Genome& genome, const SimConfig& sim,
                         const TrafficSpec& traffic, double rate,
                         RoutingAlgorithm routing = RoutingAlgorithm::XY,
                         int vc_total = 16) {
  if (static_cast<int>(genome.size()) != sim.node_count())
    throw ContractError("fitness_vc: one gene per router required");
  VcAllocation alloc;
  try {
    alloc = decode_vc_config(genome, vc_total);
  } catch (const ConfigError&) {
    return -std::numeric_limits<double>::infinity();
  }
  NetworkState net = build_network(sim, alloc);
  net.set_routing(routing);
  return throughput(net.run_window(traffic, rate));
}

}  // namespace nocsim::ea
