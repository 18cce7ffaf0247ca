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

#include <cmath>
#include <vector>

#include "nocsim/common.hpp"
#include "nocsim/ea/decode.hpp"
#include "nocsim/rng.hpp"

namespace nocsim::ea {

struct PepgConfig {
  int pairs = 8;             // symmetric sample pairs per generation (2N evals)
  double mu_lr = 1.2;        // hypothesis learning rate (rewards are standardized)
  double sigma_lr = 0.05;    // deviation learning rate
  double sigma0 = 0.15;      // initial per-parameter deviation
  double sigma_min = 1e-3;   // deviation floor
  double sigma_max = 1.0;
  double sigma_decay = 0.975;   // per-generation trust-region shrink
  double baseline_decay = 0.5;  // EMA factor for the reward baseline

  void validate() const {
    if (pairs < 1) throw ConfigError("PepgConfig: pairs must be >= 1");
    if (!(mu_lr > 0.0)) throw ConfigError("PepgConfig: mu_lr must be positive");
    if (!(sigma_lr >= 0.0)) throw ConfigError("PepgConfig: sigma_lr must be >= 0");
    if (!(sigma0 > 0.0)) throw ConfigError("PepgConfig: sigma0 must be positive");
    if (!(sigma_min > 0.0 && sigma_min <= sigma0))
      throw ConfigError("PepgConfig: sigma_min in (0, sigma0]");
    if (!(sigma_decay > 0.0 && sigma_decay <= 1.0))
      throw ConfigError("PepgConfig: sigma_decay in (0,1]");
    if (!(baseline_decay >= 0.0 && baseline_decay < 1.0))
      throw ConfigError("PepgConfig: baseline_decay in [0,1)");
  }
};

/// Parameter-exploring policy gradients with symmetric sampling. Each
/// generation draws N perturbations e ~ N(0, diag(sigma^2)) and evaluates
/// the pairs (mu + e, mu - e). Rewards are standardized within the
/// generation, the hypothesis moves along sum e * (r+ - r-)/2 and the
/// per-parameter deviations follow the log-likelihood gradient against a
/// running-mean baseline. Equal rewards in every pair leave mu unchanged.
class PepgOptimizer {
 public:
  PepgOptimizer(int dim, const PepgConfig& cfg, std::uint64_t seed)
      : cfg_(cfg), rng_(seed) {
    cfg_.validate();
    if (dim < 1) throw ConfigError("PepgOptimizer: dim must be >= 1");
    mean_.assign(static_cast<std::size_t>(dim), 0.5);
    sigma_.assign(static_cast<std::size_t>(dim), cfg_.sigma0);
  }

  int pairs() const { return cfg_.pairs; }
  const Genome& mean() const { return mean_; }
  const std::vector<double>& sigma() const { return sigma_; }

  /// 2N candidates ordered [mu+e1, mu-e1, mu+e2, mu-e2, ...]. Evaluation
  /// points are clamped to the genome box; the stored perturbations are not.
  std::vector<Genome> ask() {
    const std::size_t dim = mean_.size();
    eps_.assign(static_cast<std::size_t>(cfg_.pairs), Genome(dim));
    std::vector<Genome> out;
    out.reserve(2 * static_cast<std::size_t>(cfg_.pairs));
    for (auto& e : eps_) {
      Genome plus(dim), minus(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        e[i] = sigma_[i] * rng_.next_gaussian();
        plus[i] = clamp_gene(mean_[i] + e[i]);
        minus[i] = clamp_gene(mean_[i] - e[i]);
      }
      out.push_back(std::move(plus));
      out.push_back(std::move(minus));
    }
    return out;
  }

  void tell(const std::vector<Genome>& candidates,
            const std::vector<double>& fitnesses) {
    (void)candidates;
    if (fitnesses.size() != 2 * static_cast<std::size_t>(cfg_.pairs))
      throw ContractError("PepgOptimizer::tell: need 2*pairs fitnesses");
    update(eps_, fitnesses);
  }

  /// Applies one update from explicit perturbations, bypassing ask(). The
  /// pairing convention matches ask(): fitnesses[2p] belongs to mu+e_p and
  /// fitnesses[2p+1] to mu-e_p.
  void tell_with_perturbations(const std::vector<Genome>& eps,
                               const std::vector<double>& fitnesses) {
    if (fitnesses.size() != 2 * eps.size())
      throw ContractError("PepgOptimizer: need two fitnesses per perturbation");
    update(eps, fitnesses);
  }

  const std::vector<Genome>& last_perturbations() const { return eps_; }

 private:
  void update(const std::vector<Genome>& eps, const std::vector<double>& fitnesses) {
    const int pairs = static_cast<int>(eps.size());
    const std::size_t dim = mean_.size();

    // Reward statistics over the finite samples; pairs with a non-finite
    // member are skipped.
    double sum = 0.0, sum2 = 0.0;
    int finite = 0;
    for (double r : fitnesses) {
      if (!std::isfinite(r)) continue;
      sum += r;
      sum2 += r * r;
      ++finite;
    }
    if (finite == 0) return;
    const double mean_r = sum / finite;
    const double var = std::max(0.0, sum2 / finite - mean_r * mean_r);
    const double scale = std::sqrt(var);
    const double baseline = baseline_set_ ? baseline_ : mean_r;
    baseline_ = baseline_set_
                    ? cfg_.baseline_decay * baseline_ + (1.0 - cfg_.baseline_decay) * mean_r
                    : mean_r;
    baseline_set_ = true;
    if (scale < 1e-12) return;  // all rewards equal: nothing to learn from

    std::vector<double> gmu(dim, 0.0), gsigma(dim, 0.0);
    int used = 0;
    for (int p = 0; p < pairs; ++p) {
      const double rp = fitnesses[static_cast<std::size_t>(2 * p)];
      const double rm = fitnesses[static_cast<std::size_t>(2 * p + 1)];
      if (!std::isfinite(rp) || !std::isfinite(rm)) continue;
      ++used;
      const double diff = (rp - rm) / (2.0 * scale);
      const double adv = ((rp + rm) / 2.0 - baseline) / scale;
      const Genome& e = eps[static_cast<std::size_t>(p)];
      for (std::size_t i = 0; i < dim; ++i) {
        gmu[i] += e[i] * diff;
        gsigma[i] += ((e[i] * e[i] - sigma_[i] * sigma_[i]) / sigma_[i]) * adv;
      }
    }
    if (used == 0) return;
    for (std::size_t i = 0; i < dim; ++i) {
      mean_[i] = clamp_gene(mean_[i] + cfg_.mu_lr * gmu[i] / used);
      double s = (sigma_[i] + cfg_.sigma_lr * gsigma[i] / used) * cfg_.sigma_decay;
      if (s < cfg_.sigma_min) s = cfg_.sigma_min;
      if (s > cfg_.sigma_max) s = cfg_.sigma_max;
      sigma_[i] = s;
    }
  }

  PepgConfig cfg_;
  Rng rng_;
  Genome mean_;
  std::vector<double> sigma_;
  std::vector<Genome> eps_;
  double baseline_ = 0.0;
  bool baseline_set_ = false;
};

}  // namespace nocsim::ea
