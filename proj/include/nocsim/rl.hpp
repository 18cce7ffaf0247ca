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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "nocsim/common.hpp"
#include "nocsim/rng.hpp"

namespace nocsim::rl {

/// Dense |S| x |A| table of action-value estimates, zero-initialized.
class QTable {
 public:
  QTable() = default;
  QTable(int states, int actions)
      : states_(states), actions_(actions),
        q_(static_cast<std::size_t>(states) * static_cast<std::size_t>(actions), 0.0) {
    if (states < 0 || actions < 1)
      throw ConfigError("QTable: need non-negative states and >= 1 action");
  }

  int states() const { return states_; }
  int actions() const { return actions_; }

  double& at(int s, int a) { return q_[index(s, a)]; }
  double at(int s, int a) const { return q_[index(s, a)]; }

  /// Greedy action for s; ties break to the lowest index.
  int argmax(int s) const {
    int best = 0;
    for (int a = 1; a < actions_; ++a)
      if (q_[index(s, a)] > q_[index(s, best)]) best = a;
    return best;
  }

  double max_value(int s) const { return q_[index(s, argmax(s))]; }

  const std::vector<double>& data() const { return q_; }

  friend bool operator==(const QTable&, const QTable&) = default;

  nlohmann::json to_json() const {
    return nlohmann::json{{"rows", states_}, {"cols", actions_}, {"data", q_}};
  }

  static QTable from_json(const nlohmann::json& j) {
    QTable t(j.at("rows").get<int>(), j.at("cols").get<int>());
    const auto data = j.at("data").get<std::vector<double>>();
    if (data.size() != t.q_.size()) throw ConfigError("QTable: data size mismatch");
    t.q_ = data;
    return t;
  }

 private:
  std::size_t index(int s, int a) const {
    if (s < 0 || s >= states_ || a < 0 || a >= actions_)
      throw ContractError("QTable: index out of range");
    return static_cast<std::size_t>(s) * static_cast<std::size_t>(actions_) +
           static_cast<std::size_t>(a);
  }

  int states_ = 0;
  int actions_ = 1;
  std::vector<double> q_;
};

/// Epsilon-greedy selection: explore uniformly with probability epsilon,
/// otherwise take the greedy (lowest-index tie) action.
inline int select_action(const QTable& table, int s, double epsilon, Rng& rng) {
  if (rng.next_double() < epsilon)
    return static_cast<int>(rng.next_below(static_cast<std::uint32_t>(table.actions())));
  return table.argmax(s);
}

namespace detail {
inline void check_reward(double r) {
  if (!std::isfinite(r)) throw ContractError("td update: non-finite reward");
}
}  // namespace detail

/// Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') - Q(s,a)).
/// A terminal next state (nullopt) bootstraps from zero.
inline void update_q_learning(QTable& table, int s, int a, double r,
                              std::optional<int> s_next, double alpha, double gamma) {
  detail::check_reward(r);
  const double boot = s_next ? table.max_value(*s_next) : 0.0;
  double& q = table.at(s, a);
  q += alpha * (r + gamma * boot - q);
}

/// On-policy target: the value of the action actually selected next.
inline void update_sarsa(QTable& table, int s, int a, double r,
                         std::optional<int> s_next, int a_next, double alpha,
                         double gamma) {
  detail::check_reward(r);
  const double boot = s_next ? table.at(*s_next, a_next) : 0.0;
  double& q = table.at(s, a);
  q += alpha * (r + gamma * boot - q);
}

/// Expected value of Q(s, .) under the epsilon-greedy policy: the greedy
/// action (lowest-index tie) carries weight 1 - eps + eps/|A|, the rest
/// eps/|A| each.
inline double expected_sarsa_value(const QTable& table, int s, double epsilon) {
  const int greedy = table.argmax(s);
  const double explore = epsilon / table.actions();
  double v = 0.0;
  for (int a = 0; a < table.actions(); ++a) {
    const double w = a == greedy ? 1.0 - epsilon + explore : explore;
    v += w * table.at(s, a);
  }
  return v;
}

inline void update_expected_sarsa(QTable& table, int s, int a, double r,
                                  std::optional<int> s_next, double epsilon,
                                  double alpha, double gamma) {
  detail::check_reward(r);
  const double boot = s_next ? expected_sarsa_value(table, *s_next, epsilon) : 0.0;
  double& q = table.at(s, a);
  q += alpha * (r + gamma * boot - q);
}

/// Per-state argmax, lowest-index ties.
inline std::vector<int> greedy_policy(const QTable& table) {
  std::vector<int> policy(static_cast<std::size_t>(table.states()));
  for (int s = 0; s < table.states(); ++s)
    policy[static_cast<std::size_t>(s)] = table.argmax(s);
  return policy;
}

enum class TdAlgorithm { QLearning = 0, Sarsa = 1, ExpectedSarsa = 2 };

inline constexpr const char* name(TdAlgorithm a) {
  switch (a) {
    case TdAlgorithm::QLearning: return "q_learning";
    case TdAlgorithm::Sarsa: return "sarsa";
    case TdAlgorithm::ExpectedSarsa: return "expected_sarsa";
  }
  return "?";
}

inline TdAlgorithm parse_td_algorithm(std::string_view s) {
  for (int i = 0; i < 3; ++i) {
    const auto a = static_cast<TdAlgorithm>(i);
    if (s == name(a)) return a;
  }
  throw ConfigError("unknown td algorithm: " + std::string(s));
}

struct AgentConfig {
  double alpha = 0.1;          // step size
  double gamma = 0.99;         // discount
  double epsilon = 0.1;        // exploration probability
  double epsilon_decay = 1.0;  // per-episode multiplier
  int episodes = 50;
  TdAlgorithm algorithm = TdAlgorithm::QLearning;

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("AgentConfig: alpha in (0,1]");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("AgentConfig: gamma in [0,1]");
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
      throw ConfigError("AgentConfig: epsilon in [0,1]");
    if (!(epsilon_decay >= 0.0 && epsilon_decay <= 1.0))
      throw ConfigError("AgentConfig: epsilon_decay in [0,1]");
    if (episodes < 0) throw ConfigError("AgentConfig: episodes must be >= 0");
  }
};

struct TrainingTrace {
  struct Step {
    int episode = 0;
    int step = 0;
    int state = 0;
    int action = 0;
    double reward = 0.0;
  };
  std::vector<Step> steps;
  std::vector<double> episode_returns;             // undiscounted sums
  std::vector<double> episode_returns_discounted;  // sum gamma^t * r_t
  std::vector<int> greedy;                         // final greedy policy
  QTable table;
};

/// Episodic training loop over any environment exposing reset()/step(),
/// state_count() and action_count(). The Q-table starts at zero; SARSA
/// selects the successor action before updating.
template <class Env>
TrainingTrace train(Env& env, const AgentConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  QTable table(env.state_count(), env.action_count());
  Rng rng(seed);
  TrainingTrace trace;
  double eps = cfg.epsilon;

  for (int ep = 0; ep < cfg.episodes; ++ep) {
    auto [state, obs] = env.reset();
    (void)obs;
    double ret = 0.0, dret = 0.0, discount = 1.0;
    int action = cfg.algorithm == TdAlgorithm::Sarsa
                     ? select_action(table, state, eps, rng)
                     : 0;
    for (int t = 0;; ++t) {
      if (cfg.algorithm != TdAlgorithm::Sarsa)
        action = select_action(table, state, eps, rng);
      const auto res = env.step(action);
      std::optional<int> s_next;
      if (!res.done) s_next = res.next_state;
      const int taken = action;
      switch (cfg.algorithm) {
        case TdAlgorithm::QLearning:
          update_q_learning(table, state, action, res.reward, s_next, cfg.alpha,
                            cfg.gamma);
          break;
        case TdAlgorithm::Sarsa: {
          const int a_next =
              res.done ? 0 : select_action(table, res.next_state, eps, rng);
          update_sarsa(table, state, action, res.reward, s_next, a_next, cfg.alpha,
                       cfg.gamma);
          action = a_next;
          break;
        }
        case TdAlgorithm::ExpectedSarsa:
          update_expected_sarsa(table, state, action, res.reward, s_next, eps,
                                cfg.alpha, cfg.gamma);
          break;
      }
      trace.steps.push_back({ep, t, state, taken, res.reward});
      ret += res.reward;
      dret += discount * res.reward;
      discount *= cfg.gamma;
      if (res.done) break;
      state = res.next_state;
    }
    trace.episode_returns.push_back(ret);
    trace.episode_returns_discounted.push_back(dret);
    eps *= cfg.epsilon_decay;
  }
  trace.greedy = greedy_policy(table);
  trace.table = std::move(table);
  return trace;
}

}  // namespace nocsim::rl
