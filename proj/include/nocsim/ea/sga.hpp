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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "nocsim/common.hpp"
#include "nocsim/ea/decode.hpp"
#include "nocsim/rng.hpp"

namespace nocsim::ea {

namespace detail {

/// Candidate indices ordered best-first; non-finite fitnesses rank worst,
/// ties keep the lower index.
inline std::vector<int> rank_desc(const std::vector<double>& fitnesses) {
  std::vector<int> order(fitnesses.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double fa = fitnesses[static_cast<std::size_t>(a)];
    const double fb = fitnesses[static_cast<std::size_t>(b)];
    const bool ga = std::isfinite(fa), gb = std::isfinite(fb);
    if (ga != gb) return ga;
    if (ga && fa != fb) return fa > fb;
    return a < b;
  });
  return order;
}

}  // namespace detail

/// How survivors produce the next generation. Clone cycles exact copies of
/// the survivors; Intermediate starts every offspring from the survivor
/// centroid, whose averaging effect is what lets a 16-genome population
/// make headway on a 64-dimensional landscape.
enum class SgaRecombination { Clone, Intermediate };

struct SgaConfig {
  int population = 11;
  int selection_pressure = 2;   // keep the top population/selection_pressure
  double mutation_rate = 0.1;   // per-gene probability
  double mutation_sigma = 0.1;  // Gaussian step scale
  double sigma_decay = 1.0;     // per-generation multiplier on mutation_sigma
  SgaRecombination recombination = SgaRecombination::Clone;
  // Success-rule step control: after a generation that improves the best
  // fitness the scale multiplies by sigma_adapt_up, otherwise by
  // sigma_adapt_down. 1.0/1.0 disables adaptation.
  double sigma_adapt_up = 1.12;
  double sigma_adapt_down = 0.88;
  double sigma_min = 1e-4;

  void validate() const {
    if (population < 1) throw ConfigError("SgaConfig: population must be >= 1");
    if (selection_pressure < 1)
      throw ConfigError("SgaConfig: selection_pressure must be >= 1");
    if (population / selection_pressure < 1)
      throw ConfigError("SgaConfig: selection keeps fewer than one genome");
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0))
      throw ConfigError("SgaConfig: mutation_rate in [0,1]");
    if (!(mutation_sigma >= 0.0)) throw ConfigError("SgaConfig: mutation_sigma >= 0");
    if (!(sigma_decay > 0.0 && sigma_decay <= 1.0))
      throw ConfigError("SgaConfig: sigma_decay in (0,1]");
    if (!(sigma_adapt_up >= 1.0) || !(sigma_adapt_down > 0.0 && sigma_adapt_down <= 1.0))
      throw ConfigError("SgaConfig: adaptation factors out of range");
  }
};

/// Truncation-selection genetic algorithm over real genomes in [0, 1).
/// Survivors are cloned back up to the population size and mutated by
/// additive Gaussian noise; the best survivor passes through unmutated.
class SgaOptimizer {
 public:
  SgaOptimizer(int dim, const SgaConfig& cfg, std::uint64_t seed)
      : cfg_(cfg), sigma_(cfg.mutation_sigma), rng_(seed) {
    cfg_.validate();
    if (dim < 1) throw ConfigError("SgaOptimizer: dim must be >= 1");
    population_.assign(static_cast<std::size_t>(cfg_.population),
                       Genome(static_cast<std::size_t>(dim)));
    for (auto& g : population_)
      for (double& x : g) x = rng_.next_double();
  }

  std::vector<Genome> ask() const { return population_; }

  /// One generation step: truncate, clone, mutate.
  void tell(const std::vector<Genome>& candidates,
            const std::vector<double>& fitnesses) {
    (void)candidates;  // the population is kept internally
    const int pop = cfg_.population;
    if (static_cast<int>(fitnesses.size()) != pop)
      throw ContractError("SgaOptimizer::tell: one fitness per genome required");
    const auto order = detail::rank_desc(fitnesses);
    const int keep = pop / cfg_.selection_pressure;

    std::vector<Genome> next(static_cast<std::size_t>(pop));
    if (cfg_.recombination == SgaRecombination::Intermediate) {
      const std::size_t dim = population_.front().size();
      Genome centroid(dim, 0.0);
      for (int i = 0; i < keep; ++i) {
        const Genome& s =
            population_[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
        for (std::size_t d = 0; d < dim; ++d) centroid[d] += s[d] / keep;
      }
      next[0] = population_[static_cast<std::size_t>(order[0])];  // elite
      for (int i = 1; i < pop; ++i) next[static_cast<std::size_t>(i)] = centroid;
    } else {
      for (int i = 0; i < pop; ++i)
        next[static_cast<std::size_t>(i)] =
            population_[static_cast<std::size_t>(order[static_cast<std::size_t>(i % keep)])];
    }
    for (int i = 1; i < pop; ++i) {  // index 0 is the elite
      for (double& x : next[static_cast<std::size_t>(i)]) {
        if (rng_.next_bernoulli(cfg_.mutation_rate))
          x = clamp_gene(x + sigma_ * rng_.next_gaussian());
      }
    }
    population_ = std::move(next);

    const double gen_best = fitnesses[static_cast<std::size_t>(order[0])];
    if (has_best_ && std::isfinite(gen_best)) {
      sigma_ *= gen_best > best_seen_ ? cfg_.sigma_adapt_up : cfg_.sigma_adapt_down;
    }
    if (std::isfinite(gen_best) && (!has_best_ || gen_best > best_seen_)) {
      best_seen_ = gen_best;
      has_best_ = true;
    }
    sigma_ *= cfg_.sigma_decay;
    if (sigma_ < cfg_.sigma_min) sigma_ = cfg_.sigma_min;
  }

  const std::vector<Genome>& population() const { return population_; }
  double mutation_sigma() const { return sigma_; }

 private:
  SgaConfig cfg_;
  double sigma_;
  Rng rng_;
  std::vector<Genome> population_;
  double best_seen_ = 0.0;
  bool has_best_ = false;
};

}  // namespace nocsim::ea
