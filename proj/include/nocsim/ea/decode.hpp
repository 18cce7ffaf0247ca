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
#include <cmath>
#include <cstdint>
#include <vector>

#include "nocsim/common.hpp"
#include "nocsim/vc_allocation.hpp"

namespace nocsim::ea {

/// Real-valued parameter vector, one gene per router, each in [0, 1).
using Genome = std::vector<double>;

/// Largest representable gene value below 1.
inline constexpr double kGeneMax = 0x1.fffffffffffffp-1;

inline double clamp_gene(double g) {
  if (!(g >= 0.0)) return 0.0;  // also catches NaN
  if (g > kGeneMax) return kGeneMax;
  return g;
}

/// Caps one router's port counts at the vc_total budget: repeatedly
/// decrement the largest count (ties in N,E,S,W order), never below 1.
/// Idempotent and never increases a count.
inline void repair_budget(std::array<int, 4>& ports, int vc_total) {
  if (vc_total < 4)
    throw ConfigError("repair_budget: vc_total below one VC per port");
  int sum = 0;
  for (int v : ports) {
    if (v < 1) throw ContractError("repair_budget: counts must be >= 1");
    sum += v;
  }
  while (sum > vc_total) {
    int imax = 0;
    for (int i = 1; i < 4; ++i)
      if (ports[static_cast<std::size_t>(i)] > ports[static_cast<std::size_t>(imax)])
        imax = i;
    --ports[static_cast<std::size_t>(imax)];
    --sum;
  }
}

inline void repair_budget(VcAllocation& alloc) {
  for (auto& c : alloc.counts) repair_budget(c, alloc.vc_total);
}

/// Decodes a genome into per-router VC counts. Each gene is widened to a
/// 32-bit integer; successive base-vc_total digits become the N,E,S,W port
/// counts via max(1, (1 + digit) / 2). The raw decode can exceed the
/// per-router budget, so repair_budget() is applied afterwards. Genes
/// outside [0, 1) are clamped and counted in the result.
inline VcAllocation decode_vc_config(const Genome& genome, int vc_total,
                                     int ports = 4) {
  if (ports != 4) throw ConfigError("decode_vc_config: only 4 mesh ports supported");
  if (vc_total < ports) throw ConfigError("decode_vc_config: infeasible budget");
  VcAllocation alloc;
  alloc.vc_total = vc_total;
  alloc.counts.resize(genome.size());
  const auto total = static_cast<std::uint64_t>(vc_total);
  for (std::size_t r = 0; r < genome.size(); ++r) {
    double g = genome[r];
    if (!(g >= 0.0 && g < 1.0)) {
      g = clamp_gene(g);
      ++alloc.clamped_genes;
    }
    auto s = static_cast<std::uint64_t>(g * 4294967296.0);  // g << 32, truncated
    for (int p = 0; p < 4; ++p) {
      const auto digit = s % total;
      alloc.counts[r][static_cast<std::size_t>(p)] =
          std::max<int>(1, static_cast<int>((1 + digit) / 2));
      s /= total;
    }
    repair_budget(alloc.counts[r], vc_total);
  }
  return alloc;
}

}  // namespace nocsim::ea
