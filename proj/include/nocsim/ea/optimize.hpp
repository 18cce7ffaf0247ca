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

#include <atomic>
#include <cmath>
#include <future>
#include <limits>
#include <vector>

#include "nocsim/common.hpp"
#include "nocsim/ea/decode.hpp"

namespace nocsim::ea {

struct GenerationStats {
  int generation = 0;
  double best = 0.0;
  double mean = 0.0;
  double worst = 0.0;
};

struct FitnessHistory {
  std::vector<GenerationStats> generations;
  std::vector<double> best_so_far;  // non-decreasing by construction
};

struct OptimizeResult {
  Genome best_genome;
  double best_fitness = -std::numeric_limits<double>::infinity();
  FitnessHistory history;
};

/// Generation loop over any optimizer exposing ask()/tell(). Fitness
/// evaluations within a generation are independent and run concurrently
/// when jobs > 1; results are identical either way. Evaluation errors and
/// non-finite values rank worst.
template <class Optimizer, class Fitness>
OptimizeResult optimize(Optimizer& opt, Fitness&& fitness, int generations,
                        int jobs = 1) {
  if (generations < 1) throw ContractError("optimize: generations must be >= 1");
  constexpr double kWorst = -std::numeric_limits<double>::infinity();

  OptimizeResult res;
  for (int gen = 0; gen < generations; ++gen) {
    const std::vector<Genome> candidates = opt.ask();
    const std::size_t count = candidates.size();
    std::vector<double> fits(count, kWorst);
    auto eval_one = [&](std::size_t i) {
      try {
        fits[i] = fitness(candidates[i]);
      } catch (...) {
        fits[i] = kWorst;
      }
    };
    if (jobs <= 1) {
      for (std::size_t i = 0; i < count; ++i) eval_one(i);
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::future<void>> workers;
      const int nw = std::min<int>(jobs, static_cast<int>(count));
      workers.reserve(static_cast<std::size_t>(nw));
      for (int w = 0; w < nw; ++w)
        workers.push_back(std::async(std::launch::async, [&] {
          for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1))
            eval_one(i);
        }));
      for (auto& f : workers) f.get();
    }

    GenerationStats gs;
    gs.generation = gen;
    gs.best = kWorst;
    gs.worst = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    int finite = 0;
    for (std::size_t i = 0; i < count; ++i) {
      const double f = fits[i];
      if (!std::isfinite(f)) continue;
      ++finite;
      sum += f;
      if (f > gs.best) gs.best = f;
      if (f < gs.worst) gs.worst = f;
      if (f > res.best_fitness) {
        res.best_fitness = f;
        res.best_genome = candidates[i];
      }
    }
    if (finite == 0) {
      gs.best = gs.mean = gs.worst = kWorst;
    } else {
      gs.mean = sum / finite;
    }
    res.history.generations.push_back(gs);
    res.history.best_so_far.push_back(res.best_fitness);

    opt.tell(candidates, fits);
  }
  return res;
}

}  // namespace nocsim::ea
