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
#include <vector>

#include "nocsim/common.hpp"
#include "nocsim/ea/decode.hpp"
#include "nocsim/ea/sga.hpp"  // detail::rank_desc
#include "nocsim/rng.hpp"

namespace nocsim::ea {

namespace detail {

/// Cyclic Jacobi eigendecomposition of a symmetric matrix: a = V diag(d) V^T.
/// a is row-major n x n and is destroyed. Plenty fast for the dimensions
/// used here (n <= 64).
inline void jacobi_eigen(std::vector<double> a, int n, std::vector<double>& eigvecs,
                         std::vector<double>& eigvals) {
  auto at = [&](std::vector<double>& m, int r, int c) -> double& {
    return m[static_cast<std::size_t>(r) * static_cast<std::size_t>(n) +
             static_cast<std::size_t>(c)];
  };
  eigvecs.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) at(eigvecs, i, i) = 1.0;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) off += at(a, p, q) * at(a, p, q);
    if (off < 1e-300) break;

    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = at(a, p, q);
        if (apq == 0.0) continue;
        const double theta = (at(a, q, q) - at(a, p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int i = 0; i < n; ++i) {
          const double aip = at(a, i, p);
          const double aiq = at(a, i, q);
          at(a, i, p) = c * aip - s * aiq;
          at(a, i, q) = s * aip + c * aiq;
        }
        for (int i = 0; i < n; ++i) {
          const double api = at(a, p, i);
          const double aqi = at(a, q, i);
          at(a, p, i) = c * api - s * aqi;
          at(a, q, i) = s * api + c * aqi;
        }
        for (int i = 0; i < n; ++i) {
          const double vip = at(eigvecs, i, p);
          const double viq = at(eigvecs, i, q);
          at(eigvecs, i, p) = c * vip - s * viq;
          at(eigvecs, i, q) = s * vip + c * viq;
        }
      }
    }
  }
  eigvals.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) eigvals[static_cast<std::size_t>(i)] = at(a, i, i);
}

}  // namespace detail

struct CmaEsConfig {
  int lambda = 0;       // population size; 0 selects 4 + floor(3 ln n)
  double sigma0 = 0.3;  // initial step size
  Genome mean0;         // initial mean; empty selects 0.5 everywhere

  void validate() const {
    if (lambda < 0) throw ConfigError("CmaEsConfig: lambda must be >= 0");
    if (!(sigma0 > 0.0)) throw ConfigError("CmaEsConfig: sigma0 must be positive");
  }
};

inline int cmaes_default_lambda(int dim) {
  return 4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(dim))));
}

/// Covariance matrix adaptation evolution strategy, the standard
/// (mu/mu_w, lambda) formulation with cumulative step-size adaptation and
/// rank-1 plus rank-mu covariance updates, maximizing the fitness. Samples
/// are clamped to the [0, 1) genome box before evaluation and the update
/// uses the clamped coordinates, which keeps the mean inside the box.
class CmaEsOptimizer {
 public:
  CmaEsOptimizer(int dim, const CmaEsConfig& cfg, std::uint64_t seed)
      : n_(dim), rng_(seed) {
    cfg.validate();
    if (dim < 1) throw ConfigError("CmaEsOptimizer: dim must be >= 1");
    lambda_ = cfg.lambda > 0 ? cfg.lambda : cmaes_default_lambda(dim);
    if (lambda_ < 2) throw ConfigError("CmaEsOptimizer: lambda must be >= 2");
    mu_ = lambda_ / 2;

    weights_.resize(static_cast<std::size_t>(mu_));
    double wsum = 0.0;
    for (int i = 0; i < mu_; ++i) {
      weights_[static_cast<std::size_t>(i)] =
          std::log((lambda_ + 1) / 2.0) - std::log(i + 1.0);
      wsum += weights_[static_cast<std::size_t>(i)];
    }
    double w2sum = 0.0;
    for (double& w : weights_) {
      w /= wsum;
      w2sum += w * w;
    }
    mueff_ = 1.0 / w2sum;

    const double n = static_cast<double>(n_);
    cs_ = (mueff_ + 2.0) / (n + mueff_ + 5.0);
    damps_ = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff_ - 1.0) / (n + 1.0)) - 1.0) + cs_;
    cc_ = (4.0 + mueff_ / n) / (n + 4.0 + 2.0 * mueff_ / n);
    c1_ = 2.0 / ((n + 1.3) * (n + 1.3) + mueff_);
    cmu_ = std::min(1.0 - c1_, 2.0 * (mueff_ - 2.0 + 1.0 / mueff_) /
                                   ((n + 2.0) * (n + 2.0) + mueff_));
    chi_n_ = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

    sigma_ = cfg.sigma0;
    mean_ = cfg.mean0.empty() ? Genome(static_cast<std::size_t>(n_), 0.5) : cfg.mean0;
    if (static_cast<int>(mean_.size()) != n_)
      throw ConfigError("CmaEsOptimizer: mean0 dimension mismatch");
    pc_.assign(static_cast<std::size_t>(n_), 0.0);
    ps_.assign(static_cast<std::size_t>(n_), 0.0);
    cov_.assign(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), 0.0);
    for (int i = 0; i < n_; ++i) cov(i, i) = 1.0;
    refresh_eigen();
  }

  int lambda() const { return lambda_; }
  double sigma() const { return sigma_; }
  const Genome& mean() const { return mean_; }
  double covariance(int i, int j) const { return cov_value(i, j); }
  double min_eigenvalue() const {
    double m = eigvals_[0];
    for (double e : eigvals_) m = std::min(m, e);
    return m;
  }
  double max_covariance_asymmetry() const {
    double m = 0.0;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        m = std::max(m, std::abs(cov_value(i, j) - cov_value(j, i)));
    return m;
  }

  /// Samples lambda candidates from N(mean, sigma^2 C), clamped to [0, 1).
  std::vector<Genome> ask() {
    std::vector<Genome> xs(static_cast<std::size_t>(lambda_),
                           Genome(static_cast<std::size_t>(n_)));
    std::vector<double> z(static_cast<std::size_t>(n_));
    for (auto& x : xs) {
      for (double& zi : z) zi = rng_.next_gaussian();
      // y = B * (D .* z)
      for (int i = 0; i < n_; ++i) {
        double yi = 0.0;
        for (int j = 0; j < n_; ++j)
          yi += basis(i, j) * scale_[static_cast<std::size_t>(j)] *
                z[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] =
            clamp_gene(mean_[static_cast<std::size_t>(i)] + sigma_ * yi);
      }
    }
    return xs;
  }

  /// Updates mean, evolution paths, covariance and step size from the
  /// evaluated candidates. Non-finite fitness ranks worst.
  void tell(const std::vector<Genome>& candidates,
            const std::vector<double>& fitnesses) {
    if (static_cast<int>(candidates.size()) != lambda_ ||
        candidates.size() != fitnesses.size())
      throw ContractError("CmaEsOptimizer::tell: lambda candidates and fitnesses");
    const auto order = detail::rank_desc(fitnesses);

    // y_i in the pre-clamp coordinate system of this generation's sampling.
    std::vector<Genome> ys(static_cast<std::size_t>(mu_));
    Genome yw(static_cast<std::size_t>(n_), 0.0);
    for (int i = 0; i < mu_; ++i) {
      const Genome& x = candidates[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
      Genome& y = ys[static_cast<std::size_t>(i)];
      y.resize(static_cast<std::size_t>(n_));
      for (int d = 0; d < n_; ++d) {
        y[static_cast<std::size_t>(d)] =
            (x[static_cast<std::size_t>(d)] - mean_[static_cast<std::size_t>(d)]) / sigma_;
        yw[static_cast<std::size_t>(d)] +=
            weights_[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(d)];
      }
    }
    for (int d = 0; d < n_; ++d)
      mean_[static_cast<std::size_t>(d)] += sigma_ * yw[static_cast<std::size_t>(d)];

    // ps = (1-cs) ps + sqrt(cs(2-cs) mueff) C^-1/2 yw
    const Genome cinv_yw = mult_c_inv_sqrt(yw);
    const double cs_scale = std::sqrt(cs_ * (2.0 - cs_) * mueff_);
    double ps_norm2 = 0.0;
    for (int d = 0; d < n_; ++d) {
      ps_[static_cast<std::size_t>(d)] = (1.0 - cs_) * ps_[static_cast<std::size_t>(d)] +
                                         cs_scale * cinv_yw[static_cast<std::size_t>(d)];
      ps_norm2 += ps_[static_cast<std::size_t>(d)] * ps_[static_cast<std::size_t>(d)];
    }
    ++generation_;
    const double ps_norm = std::sqrt(ps_norm2);
    const double expected = std::sqrt(
        1.0 - std::pow(1.0 - cs_, 2.0 * static_cast<double>(generation_)));
    const bool hsig =
        ps_norm / expected < (1.4 + 2.0 / (n_ + 1.0)) * chi_n_;

    const double cc_scale = std::sqrt(cc_ * (2.0 - cc_) * mueff_);
    for (int d = 0; d < n_; ++d)
      pc_[static_cast<std::size_t>(d)] =
          (1.0 - cc_) * pc_[static_cast<std::size_t>(d)] +
          (hsig ? cc_scale * yw[static_cast<std::size_t>(d)] : 0.0);

    const double decay =
        1.0 - c1_ - cmu_ + (hsig ? 0.0 : c1_ * cc_ * (2.0 - cc_));
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j <= i; ++j) {
        double v = decay * cov(i, j) +
                   c1_ * pc_[static_cast<std::size_t>(i)] * pc_[static_cast<std::size_t>(j)];
        for (int w = 0; w < mu_; ++w)
          v += cmu_ * weights_[static_cast<std::size_t>(w)] *
               ys[static_cast<std::size_t>(w)][static_cast<std::size_t>(i)] *
               ys[static_cast<std::size_t>(w)][static_cast<std::size_t>(j)];
        cov(i, j) = v;
        cov(j, i) = v;
      }
    }

    sigma_ *= std::exp((cs_ / damps_) * (ps_norm / chi_n_ - 1.0));
    refresh_eigen();
  }

 private:
  double& cov(int i, int j) {
    return cov_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) +
                static_cast<std::size_t>(j)];
  }
  double cov_value(int i, int j) const {
    return cov_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) +
                static_cast<std::size_t>(j)];
  }
  double basis(int i, int j) const {
    return eigvecs_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) +
                    static_cast<std::size_t>(j)];
  }

  void refresh_eigen() {
    detail::jacobi_eigen(cov_, n_, eigvecs_, eigvals_);
    scale_.resize(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
      // Numerical floor; the update keeps C positive definite analytically.
      const double e = std::max(eigvals_[static_cast<std::size_t>(i)], 1e-30);
      eigvals_[static_cast<std::size_t>(i)] = e;
      scale_[static_cast<std::size_t>(i)] = std::sqrt(e);
    }
  }

  // C^-1/2 v = B diag(1/sqrt(eig)) B^T v
  Genome mult_c_inv_sqrt(const Genome& v) const {
    Genome t(static_cast<std::size_t>(n_), 0.0);
    for (int j = 0; j < n_; ++j) {
      double s = 0.0;
      for (int i = 0; i < n_; ++i)
        s += basis(i, j) * v[static_cast<std::size_t>(i)];
      t[static_cast<std::size_t>(j)] = s / scale_[static_cast<std::size_t>(j)];
    }
    Genome out(static_cast<std::size_t>(n_), 0.0);
    for (int i = 0; i < n_; ++i) {
      double s = 0.0;
      for (int j = 0; j < n_; ++j)
        s += basis(i, j) * t[static_cast<std::size_t>(j)];
      out[static_cast<std::size_t>(i)] = s;
    }
    return out;
  }

  int n_;
  Rng rng_;
  int lambda_ = 0;
  int mu_ = 0;
  std::vector<double> weights_;
  double mueff_ = 0.0;
  double cs_ = 0.0, damps_ = 0.0, cc_ = 0.0, c1_ = 0.0, cmu_ = 0.0, chi_n_ = 0.0;
  double sigma_ = 0.3;
  Genome mean_;
  Genome pc_, ps_;
  std::vector<double> cov_;
  std::vector<double> eigvecs_, eigvals_, scale_;
  std::int64_t generation_ = 0;
};

}  // namespace nocsim::ea
