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
#include <vector>

#include "nocsim/common.hpp"
#include "nocsim/mesh.hpp"

namespace nocsim {

/// Per-router VC counts for the four mesh input ports, in N,E,S,W order.
/// Local ports are not covered; they keep the configuration default.
struct VcAllocation {
  int vc_total = 16;                        // budget per router
  std::vector<std::array<int, 4>> counts;   // counts[router][port]
  int clamped_genes = 0;                    // decoder bookkeeping

  void validate(int node_count) const {
    if (vc_total < kMeshPorts)
      throw ConfigError("VcAllocation: vc_total below one VC per port");
    if (static_cast<int>(counts.size()) != node_count)
      throw ConfigError("VcAllocation: must cover every router");
    for (const auto& c : counts) {
      int sum = 0;
      for (int v : c) {
        if (v < 1) throw ConfigError("VcAllocation: every port needs >= 1 VC");
        sum += v;
      }
      if (sum > vc_total)
        throw ConfigError("VcAllocation: router exceeds vc_total budget");
    }
  }
};

}  // namespace nocsim
