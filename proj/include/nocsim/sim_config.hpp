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

#include <cstdint>

#include "nocsim/common.hpp"

namespace nocsim {

/// Build-time parameters of one simulated network.
struct SimConfig {
  int mesh_radix = 8;        // nodes per dimension (k); k*k routers total
  int vc_default = 4;        // VCs per input port when no allocation is given
  int vc_buffer_depth = 4;   // flits per VC buffer
  int packet_length = 5;     // flits per packet (head + bodies + tail)
  Cycle warmup_cycles = 1000;
  Cycle measure_cycles = 10000;
  Cycle stall_threshold = 2000;  // zero-progress cycles before deadlock is declared
  std::uint64_t rng_seed = 1;

  int node_count() const { return mesh_radix * mesh_radix; }

  void validate() const {
    if (mesh_radix < 2) throw ConfigError("SimConfig: mesh_radix must be >= 2");
    if (vc_default < 1) throw ConfigError("SimConfig: vc_default must be >= 1");
    if (vc_buffer_depth < 1)
      throw ConfigError("SimConfig: vc_buffer_depth must be >= 1");
    if (packet_length < 1)
      throw ConfigError("SimConfig: packet_length must be >= 1");
    if (warmup_cycles < 0)
      throw ConfigError("SimConfig: warmup_cycles must be >= 0");
    if (measure_cycles < 1)
      throw ConfigError("SimConfig: measure_cycles must be >= 1");
    if (stall_threshold < 1)
      throw ConfigError("SimConfig: stall_threshold must be >= 1");
  }
};

}  // namespace nocsim
