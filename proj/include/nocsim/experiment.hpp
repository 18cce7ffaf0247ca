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
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "nocsim/common.hpp"
#include "nocsim/ea/cmaes.hpp"
#include "nocsim/ea/fitness.hpp"
#include "nocsim/ea/optimize.hpp"
#include "nocsim/ea/pepg.hpp"
#include "nocsim/ea/sga.hpp"
#include "nocsim/env.hpp"
#include "nocsim/rl.hpp"

namespace nocsim {

// ---------------------------------------------------------------------------
// Hardware cost model

struct CostModel {
  double cost_baseline = 0.0;
  double cost_system = 0.0;
};

/// Additional cost of a system over its baseline, as a percentage.
inline double cost_ratio(const CostModel& m) {
  if (!(m.cost_baseline > 0.0))
    throw ContractError("cost_ratio: cost_baseline must be positive");
  return 100.0 * (m.cost_system - m.cost_baseline) / m.cost_baseline;
}

// ---------------------------------------------------------------------------
// Experiment configuration (strict JSON schema; unknown keys are errors)

enum class ExperimentKind { Case1Rl, Case2Rl, Case2VcEa };

inline constexpr const char* name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Case1Rl: return "case1_rl";
    case ExperimentKind::Case2Rl: return "case2_rl";
    case ExperimentKind::Case2VcEa: return "case2_vc_ea";
  }
  return "?";
}

enum class EaAlgorithm { Sga, CmaEs, Pepg };

inline constexpr const char* name(EaAlgorithm a) {
  switch (a) {
    case EaAlgorithm::Sga: return "sga";
    case EaAlgorithm::CmaEs: return "cmaes";
    case EaAlgorithm::Pepg: return "pepg";
  }
  return "?";
}

inline EaAlgorithm parse_ea_algorithm(const std::string& s) {
  for (int i = 0; i < 3; ++i) {
    const auto a = static_cast<EaAlgorithm>(i);
    if (s == name(a)) return a;
  }
  throw ConfigError("unknown optimizer algorithm: " + s);
}

struct EnvBlock {
  int case_id = 1;
  double rate = 0.5;                   // case 2 injection rate
  std::string pattern = "uniform_random";  // case 1 traffic
  std::vector<std::string> patterns;   // case 2 sequence (defaulted if empty)
  double threshold = std::numeric_limits<double>::infinity();
  RewardMetric reward = RewardMetric::Throughput;
};

struct EaBlock {
  EaAlgorithm algorithm = EaAlgorithm::CmaEs;
  int generations = 50;
  int vc_total = 16;
  RoutingAlgorithm routing = RoutingAlgorithm::XY;
  double rate = 0.4;
  std::string pattern = "tornado";
  int population = 0;  // 0: per-algorithm default
  ea::SgaConfig sga;
  ea::CmaEsConfig cmaes;
  ea::PepgConfig pepg;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Case1Rl;
  SimConfig sim;
  EnvBlock env;
  rl::AgentConfig agent;
  EaBlock ea;
  std::string out_dir = "runs/out";
  std::uint64_t master_seed = 1;
  int repetitions = 1;
  int jobs = 1;  // worker threads for independent fitness evaluations
};

namespace detail {

inline void require_keys(const nlohmann::json& obj, const std::string& path,
                         const std::set<std::string>& allowed) {
  if (!obj.is_object())
    throw ConfigError(path + ": expected a JSON object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key)) throw ConfigError(path + "." + key + ": unknown key");
  }
}

template <class T>
T get_field(const nlohmann::json& obj, const std::string& path, const char* key,
            T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(path + "." + key + ": wrong type");
  }
}

inline const std::vector<std::string> kDefaultCase2Patterns{
    "uniform_random", "tornado", "bit_reverse", "bit_rotation",
    "shuffle",        "transpose", "neighbor"};

}  // namespace detail

inline SimConfig parse_sim_block(const nlohmann::json& j, const std::string& path) {
  detail::require_keys(j, path,
                       {"mesh_radix", "vc_default", "vc_buffer_depth", "packet_length",
                        "warmup_cycles", "measure_cycles", "stall_threshold",
                        "rng_seed"});
  SimConfig sim;
  sim.mesh_radix = detail::get_field(j, path, "mesh_radix", sim.mesh_radix);
  sim.vc_default = detail::get_field(j, path, "vc_default", sim.vc_default);
  sim.vc_buffer_depth = detail::get_field(j, path, "vc_buffer_depth", sim.vc_buffer_depth);
  sim.packet_length = detail::get_field(j, path, "packet_length", sim.packet_length);
  sim.warmup_cycles = detail::get_field(j, path, "warmup_cycles", sim.warmup_cycles);
  sim.measure_cycles = detail::get_field(j, path, "measure_cycles", sim.measure_cycles);
  sim.stall_threshold = detail::get_field(j, path, "stall_threshold", sim.stall_threshold);
  sim.rng_seed = detail::get_field(j, path, "rng_seed", sim.rng_seed);
  try {
    sim.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return sim;
}

inline EnvBlock parse_env_block(const nlohmann::json& j, const std::string& path) {
  detail::require_keys(j, path,
                       {"case", "rate", "pattern", "patterns", "threshold", "reward"});
  EnvBlock env;
  env.case_id = detail::get_field(j, path, "case", env.case_id);
  if (env.case_id != 1 && env.case_id != 2)
    throw ConfigError(path + ".case: must be 1 or 2");
  env.rate = detail::get_field(j, path, "rate", env.rate);
  env.pattern = detail::get_field(j, path, "pattern", env.pattern);
  env.patterns = detail::get_field(j, path, "patterns", env.patterns);
  env.threshold = detail::get_field(j, path, "threshold", env.threshold);
  const std::string reward =
      detail::get_field<std::string>(j, path, "reward", "throughput");
  if (reward == "throughput") {
    env.reward = RewardMetric::Throughput;
  } else if (reward == "neg_latency") {
    env.reward = RewardMetric::NegLatency;
  } else {
    throw ConfigError(path + ".reward: must be throughput or neg_latency");
  }
  return env;
}

inline rl::AgentConfig parse_agent_block(const nlohmann::json& j,
                                         const std::string& path) {
  detail::require_keys(
      j, path, {"algorithm", "alpha", "gamma", "epsilon", "epsilon_decay", "episodes"});
  rl::AgentConfig a;
  a.algorithm = rl::parse_td_algorithm(
      detail::get_field<std::string>(j, path, "algorithm", "q_learning"));
  a.alpha = detail::get_field(j, path, "alpha", a.alpha);
  a.gamma = detail::get_field(j, path, "gamma", a.gamma);
  a.epsilon = detail::get_field(j, path, "epsilon", a.epsilon);
  a.epsilon_decay = detail::get_field(j, path, "epsilon_decay", a.epsilon_decay);
  a.episodes = detail::get_field(j, path, "episodes", a.episodes);
  try {
    a.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return a;
}

inline EaBlock parse_optimizer_block(const nlohmann::json& j, const std::string& path) {
  detail::require_keys(j, path,
                       {"algorithm", "generations", "vc_total", "routing", "rate",
                        "pattern", "population", "selection_pressure", "mutation_rate",
                        "mutation_sigma", "sigma_decay", "sigma0", "mu_lr", "sigma_lr",
                        "sigma_min", "baseline_decay"});
  EaBlock ea;
  ea.algorithm = parse_ea_algorithm(
      detail::get_field<std::string>(j, path, "algorithm", "cmaes"));
  ea.generations = detail::get_field(j, path, "generations", ea.generations);
  ea.vc_total = detail::get_field(j, path, "vc_total", ea.vc_total);
  ea.routing = parse_routing_algorithm(
      detail::get_field<std::string>(j, path, "routing", "xy"));
  ea.rate = detail::get_field(j, path, "rate", ea.rate);
  ea.pattern = detail::get_field(j, path, "pattern", ea.pattern);
  ea.population = detail::get_field(j, path, "population", ea.population);

  ea.sga.mutation_rate = detail::get_field(j, path, "mutation_rate", ea.sga.mutation_rate);
  ea.sga.mutation_sigma =
      detail::get_field(j, path, "mutation_sigma", ea.sga.mutation_sigma);
  ea.sga.sigma_decay = detail::get_field(j, path, "sigma_decay", ea.sga.sigma_decay);
  ea.sga.selection_pressure =
      detail::get_field(j, path, "selection_pressure", ea.sga.selection_pressure);
  ea.cmaes.sigma0 = detail::get_field(j, path, "sigma0", ea.cmaes.sigma0);
  ea.pepg.sigma0 = detail::get_field(j, path, "sigma0", ea.pepg.sigma0);
  ea.pepg.mu_lr = detail::get_field(j, path, "mu_lr", ea.pepg.mu_lr);
  ea.pepg.sigma_lr = detail::get_field(j, path, "sigma_lr", ea.pepg.sigma_lr);
  ea.pepg.sigma_min = detail::get_field(j, path, "sigma_min", ea.pepg.sigma_min);
  ea.pepg.baseline_decay =
      detail::get_field(j, path, "baseline_decay", ea.pepg.baseline_decay);

  if (ea.generations < 1) throw ConfigError(path + ".generations: must be >= 1");
  if (ea.vc_total < 4) throw ConfigError(path + ".vc_total: must be >= 4");
  if (!(ea.rate >= 0.0 && ea.rate <= 1.0))
    throw ConfigError(path + ".rate: must be in [0, 1]");
  if (ea.population < 0) throw ConfigError(path + ".population: must be >= 0");
  return ea;
}

/// Parses and validates a full experiment config. Unknown keys anywhere are
/// errors, reported with their field path.
inline ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
  detail::require_keys(j, "config",
                       {"kind", "sim", "env", "agent", "optimizer", "out",
                        "master_seed", "repetitions", "jobs"});
  ExperimentConfig cfg;
  const std::string kind = detail::get_field<std::string>(j, "config", "kind", "");
  if (kind == "case1_rl") {
    cfg.kind = ExperimentKind::Case1Rl;
  } else if (kind == "case2_rl") {
    cfg.kind = ExperimentKind::Case2Rl;
  } else if (kind == "case2_vc_ea") {
    cfg.kind = ExperimentKind::Case2VcEa;
  } else {
    throw ConfigError("config.kind: must be case1_rl, case2_rl or case2_vc_ea");
  }
  if (j.contains("sim")) cfg.sim = parse_sim_block(j.at("sim"), "sim");
  cfg.out_dir = detail::get_field<std::string>(j, "config", "out", cfg.out_dir);
  cfg.master_seed = detail::get_field(j, "config", "master_seed", cfg.master_seed);
  cfg.repetitions = detail::get_field(j, "config", "repetitions", cfg.repetitions);
  if (cfg.repetitions < 1) throw ConfigError("config.repetitions: must be >= 1");
  cfg.jobs = detail::get_field(j, "config", "jobs", cfg.jobs);
  if (cfg.jobs < 1) throw ConfigError("config.jobs: must be >= 1");

  const bool is_rl = cfg.kind != ExperimentKind::Case2VcEa;
  if (is_rl) {
    if (j.contains("optimizer"))
      throw ConfigError("optimizer: not used by RL experiment kinds");
    if (j.contains("env")) cfg.env = parse_env_block(j.at("env"), "env");
    if (j.contains("agent")) cfg.agent = parse_agent_block(j.at("agent"), "agent");
    const int expected_case = cfg.kind == ExperimentKind::Case1Rl ? 1 : 2;
    if (j.contains("env") && cfg.env.case_id != expected_case)
      throw ConfigError("env.case: does not match config.kind");
    cfg.env.case_id = expected_case;
    if (cfg.kind == ExperimentKind::Case2Rl) {
      if (cfg.env.patterns.empty()) cfg.env.patterns = detail::kDefaultCase2Patterns;
      if (cfg.env.patterns.size() != 7)
        throw ConfigError("env.patterns: exactly 7 patterns required");
      for (const auto& p : cfg.env.patterns) parse_traffic_pattern(p);
      if (!(cfg.env.rate >= 0.0 && cfg.env.rate <= 1.0))
        throw ConfigError("env.rate: must be in [0, 1]");
    } else {
      parse_traffic_pattern(cfg.env.pattern);
    }
  } else {
    if (j.contains("env")) throw ConfigError("env: not used by case2_vc_ea");
    if (j.contains("agent")) throw ConfigError("agent: not used by case2_vc_ea");
    if (j.contains("optimizer"))
      cfg.ea = parse_optimizer_block(j.at("optimizer"), "optimizer");
    parse_traffic_pattern(cfg.ea.pattern);
  }
  return cfg;
}

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": JSON parse error: " + e.what());
  }
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  return parse_experiment_config(load_json_file(path));
}

/// Serializes the fully-resolved config, defaults included, for manifests.
inline nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["kind"] = name(cfg.kind);
  j["sim"] = {{"mesh_radix", cfg.sim.mesh_radix},
              {"vc_default", cfg.sim.vc_default},
              {"vc_buffer_depth", cfg.sim.vc_buffer_depth},
              {"packet_length", cfg.sim.packet_length},
              {"warmup_cycles", cfg.sim.warmup_cycles},
              {"measure_cycles", cfg.sim.measure_cycles},
              {"stall_threshold", cfg.sim.stall_threshold},
              {"rng_seed", cfg.sim.rng_seed}};
  j["out"] = cfg.out_dir;
  j["master_seed"] = cfg.master_seed;
  j["repetitions"] = cfg.repetitions;
  j["jobs"] = cfg.jobs;
  if (cfg.kind != ExperimentKind::Case2VcEa) {
    j["env"] = {{"case", cfg.env.case_id},
                {"rate", cfg.env.rate},
                {"pattern", cfg.env.pattern},
                {"patterns", cfg.env.patterns},
                {"reward", cfg.env.reward == RewardMetric::Throughput ? "throughput"
                                                                      : "neg_latency"}};
    // +inf (the "never" threshold) has no JSON encoding; omit it instead.
    if (std::isfinite(cfg.env.threshold)) j["env"]["threshold"] = cfg.env.threshold;
    j["agent"] = {{"algorithm", rl::name(cfg.agent.algorithm)},
                  {"alpha", cfg.agent.alpha},
                  {"gamma", cfg.agent.gamma},
                  {"epsilon", cfg.agent.epsilon},
                  {"epsilon_decay", cfg.agent.epsilon_decay},
                  {"episodes", cfg.agent.episodes}};
  } else {
    j["optimizer"] = {{"algorithm", name(cfg.ea.algorithm)},
                      {"generations", cfg.ea.generations},
                      {"vc_total", cfg.ea.vc_total},
                      {"routing", name(cfg.ea.routing)},
                      {"rate", cfg.ea.rate},
                      {"pattern", cfg.ea.pattern},
                      {"population", cfg.ea.population}};
  }
  return j;
}

// ---------------------------------------------------------------------------
// Environments and baselines

/// Builds the configured environment with an explicit master seed (the
/// repetition seed in experiments).
inline MeshEnv make_env(const ExperimentConfig& cfg, std::uint64_t master_seed) {
  SimConfig sim = cfg.sim;
  sim.rng_seed = master_seed;
  if (cfg.kind == ExperimentKind::Case1Rl) {
    TrafficSpec traffic{parse_traffic_pattern(cfg.env.pattern), sim.mesh_radix};
    return MeshEnv::make_case1(sim, traffic, cfg.env.threshold, cfg.env.reward);
  }
  if (cfg.kind == ExperimentKind::Case2Rl) {
    std::vector<TrafficSpec> seq;
    for (const auto& p : cfg.env.patterns)
      seq.push_back(TrafficSpec{parse_traffic_pattern(p), sim.mesh_radix});
    return MeshEnv::make_case2(sim, cfg.env.rate, seq, cfg.env.threshold,
                               cfg.env.reward);
  }
  throw ConfigError("make_env: experiment kind has no environment");
}

struct BaselineCell {
  int state = 0;
  std::string label;  // "rate=0.3" or the pattern name
  RoutingAlgorithm algorithm = RoutingAlgorithm::XY;
  WindowStats stats;
};

inline std::string phase_label(const MeshEnv& env, int phase, bool case1) {
  if (case1) return "rate=" + detail::format_g6(env.phase(phase).rate);
  return name(env.phase(phase).traffic.pattern);
}

/// Every fixed routing algorithm across every phase, on the episode-0
/// random streams.
inline std::vector<BaselineCell> baseline_sweep_cells(const MeshEnv& env,
                                                      bool case1,
                                                      std::uint64_t episode_index = 0) {
  std::vector<BaselineCell> cells;
  for (int s = 0; s < env.state_count(); ++s) {
    for (int a = 0; a < kRoutingAlgorithmCount; ++a) {
      BaselineCell c;
      c.state = s;
      c.label = phase_label(env, s, case1);
      c.algorithm = static_cast<RoutingAlgorithm>(a);
      c.stats = env.evaluate_phase(s, c.algorithm, episode_index);
      cells.push_back(std::move(c));
    }
  }
  return cells;
}

// ---------------------------------------------------------------------------
// Artifact writing

struct Manifest {
  nlohmann::json resolved_config;
  std::vector<std::uint64_t> seeds;
  std::vector<std::uint64_t> failed_seeds;
  std::vector<std::string> artifacts;  // file names, manifest.json excluded

  nlohmann::json to_json() const {
    return nlohmann::json{{"config", resolved_config},
                          {"seeds", seeds},
                          {"failed_seeds", failed_seeds},
                          {"artifacts", artifacts}};
  }
};

struct ExperimentResult {
  bool ok = true;
  std::string out_dir;
  Manifest manifest;
};

namespace detail {

class ArtifactDir {
 public:
  explicit ArtifactDir(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw ConfigError("cannot create output directory: " + dir);
  }

  /// Writes a file and records it in the manifest file list.
  void write(Manifest& manifest, const std::string& name, const std::string& body) {
    std::ofstream out(std::filesystem::path(dir_) / name, std::ios::binary);
    if (!out) throw ConfigError("cannot write artifact: " + name);
    out << body;
    manifest.artifacts.push_back(name);
  }

  void write_manifest(const Manifest& manifest) {
    std::ofstream out(std::filesystem::path(dir_) / "manifest.json", std::ios::binary);
    if (!out) throw ConfigError("cannot write manifest.json");
    out << manifest.to_json().dump(2) << "\n";
  }

  const std::string& path() const { return dir_; }

 private:
  std::string dir_;
};

inline std::string csv_join(std::initializer_list<std::string> cells) {
  std::string row;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) row += ',';
    row += c;
    first = false;
  }
  return row;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Runners

inline std::string baseline_csv(const std::vector<BaselineCell>& cells) {
  std::string csv = "state,label,algorithm,throughput,avg_latency,deadlock\n";
  for (const auto& c : cells) {
    const double lat = c.stats.packets_received > 0 ? avg_latency(c.stats) : 0.0;
    csv += detail::csv_join({std::to_string(c.state), c.label, name(c.algorithm),
                             detail::format_g6(throughput(c.stats)),
                             detail::format_g6(lat),
                             c.stats.deadlock ? "1" : "0"});
    csv += '\n';
  }
  return csv;
}

/// Runs the fixed-algorithm sweep for an RL experiment config and writes
/// baseline.csv (per repetition seed).
inline ExperimentResult baseline_sweep(const ExperimentConfig& cfg) {
  if (cfg.kind == ExperimentKind::Case2VcEa)
    throw ConfigError("baseline_sweep: requires an RL experiment kind");
  ExperimentResult res;
  res.out_dir = cfg.out_dir;
  res.manifest.resolved_config = to_json(cfg);
  detail::ArtifactDir dir(cfg.out_dir);
  const bool case1 = cfg.kind == ExperimentKind::Case1Rl;
  for (int rep = 0; rep < cfg.repetitions; ++rep) {
    const std::uint64_t seed = cfg.master_seed + static_cast<std::uint64_t>(rep);
    res.manifest.seeds.push_back(seed);
    try {
      const MeshEnv env = make_env(cfg, seed);
      const auto cells = baseline_sweep_cells(env, case1);
      dir.write(res.manifest, "baseline_rep" + std::to_string(rep) + ".csv",
                baseline_csv(cells));
    } catch (const std::exception&) {
      res.ok = false;
      res.manifest.failed_seeds.push_back(seed);
    }
  }
  dir.write_manifest(res.manifest);
  return res;
}

namespace detail {

inline std::string trace_csv(const rl::TrainingTrace& trace) {
  std::string csv = "episode,step,state,action,reward\n";
  for (const auto& s : trace.steps) {
    csv += csv_join({std::to_string(s.episode), std::to_string(s.step),
                     std::to_string(s.state), std::to_string(s.action),
                     format_g6(s.reward)});
    csv += '\n';
  }
  return csv;
}

inline nlohmann::json policy_json(const rl::TrainingTrace& trace,
                                  const rl::AgentConfig& agent) {
  nlohmann::json actions = nlohmann::json::array();
  for (int a : trace.greedy) actions.push_back(name(static_cast<RoutingAlgorithm>(a)));
  return nlohmann::json{{"algorithm", rl::name(agent.algorithm)},
                        {"greedy_policy", trace.greedy},
                        {"greedy_policy_names", actions},
                        {"q_table", trace.table.to_json()}};
}

}  // namespace detail

/// End-to-end experiment: trains (or optimizes) per repetition and writes
/// plot-ready CSV/JSON artifacts plus a run manifest. Failures of single
/// repetitions are recorded and reported via ok=false.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult res;
  res.out_dir = cfg.out_dir;
  res.manifest.resolved_config = to_json(cfg);
  detail::ArtifactDir dir(cfg.out_dir);

  if (cfg.kind == ExperimentKind::Case2VcEa) {
    for (int rep = 0; rep < cfg.repetitions; ++rep) {
      const std::uint64_t seed = cfg.master_seed + static_cast<std::uint64_t>(rep);
      res.manifest.seeds.push_back(seed);
      try {
        SimConfig sim = cfg.sim;
        sim.rng_seed = seed;
        const TrafficSpec traffic{parse_traffic_pattern(cfg.ea.pattern), sim.mesh_radix};
        auto fitness = [&](const ea::Genome& g) {
          return ea::fitness_vc(g, sim, traffic, cfg.ea.rate, cfg.ea.routing,
                                cfg.ea.vc_total);
        };
        const int dim = sim.node_count();
        const std::uint64_t opt_seed = derive_seed(seed, 0xEA);
        ea::OptimizeResult opt_res;
        if (cfg.ea.algorithm == EaAlgorithm::Sga) {
          ea::SgaConfig sga = cfg.ea.sga;
          if (cfg.ea.population > 0) sga.population = cfg.ea.population;
          ea::SgaOptimizer opt(dim, sga, opt_seed);
          opt_res = ea::optimize(opt, fitness, cfg.ea.generations, cfg.jobs);
        } else if (cfg.ea.algorithm == EaAlgorithm::CmaEs) {
          ea::CmaEsConfig cma = cfg.ea.cmaes;
          if (cfg.ea.population > 0) cma.lambda = cfg.ea.population;
          ea::CmaEsOptimizer opt(dim, cma, opt_seed);
          opt_res = ea::optimize(opt, fitness, cfg.ea.generations, cfg.jobs);
        } else {
          ea::PepgConfig pepg = cfg.ea.pepg;
          if (cfg.ea.population > 0) pepg.pairs = std::max(1, cfg.ea.population / 2);
          ea::PepgOptimizer opt(dim, pepg, opt_seed);
          opt_res = ea::optimize(opt, fitness, cfg.ea.generations, cfg.jobs);
        }

        std::string csv = "generation,best,mean,worst\n";
        for (const auto& g : opt_res.history.generations) {
          csv += detail::csv_join({std::to_string(g.generation),
                                   detail::format_g6(g.best), detail::format_g6(g.mean),
                                   detail::format_g6(g.worst)});
          csv += '\n';
        }
        dir.write(res.manifest, "fitness_rep" + std::to_string(rep) + ".csv", csv);

        const VcAllocation alloc =
            ea::decode_vc_config(opt_res.best_genome, cfg.ea.vc_total);
        nlohmann::json best{{"genome", opt_res.best_genome},
                            {"allocation", alloc.counts},
                            {"vc_total", cfg.ea.vc_total},
                            {"fitness", detail::round_g6(opt_res.best_fitness)}};
        dir.write(res.manifest, "best_rep" + std::to_string(rep) + ".json",
                  best.dump(2) + "\n");
      } catch (const std::exception&) {
        res.ok = false;
        res.manifest.failed_seeds.push_back(seed);
      }
    }
    dir.write_manifest(res.manifest);
    return res;
  }

  // RL experiments.
  const bool case1 = cfg.kind == ExperimentKind::Case1Rl;
  std::vector<std::vector<double>> returns_per_rep;
  std::string comparison_csv =
      "rep,state,label,rl_action,rl_throughput,best_algorithm,best_throughput,"
      "ratio,xy,random_minimal,oblivious_north_last,adaptive_north_last\n";
  for (int rep = 0; rep < cfg.repetitions; ++rep) {
    const std::uint64_t seed = cfg.master_seed + static_cast<std::uint64_t>(rep);
    res.manifest.seeds.push_back(seed);
    try {
      MeshEnv env = make_env(cfg, seed);
      const auto trace = rl::train(env, cfg.agent, derive_seed(seed, 0xA6));
      dir.write(res.manifest, "trace_rep" + std::to_string(rep) + ".csv",
                detail::trace_csv(trace));
      dir.write(res.manifest, "policy_rep" + std::to_string(rep) + ".json",
                detail::policy_json(trace, cfg.agent).dump(2) + "\n");
      returns_per_rep.push_back(trace.episode_returns);

      const auto cells = baseline_sweep_cells(env, case1);
      for (int s = 0; s < env.state_count(); ++s) {
        const int chosen = trace.greedy.empty() ? 0 : trace.greedy[static_cast<std::size_t>(s)];
        double best_tp = -1.0;
        RoutingAlgorithm best_alg = RoutingAlgorithm::XY;
        double rl_tp = 0.0;
        std::array<double, kRoutingAlgorithmCount> by_alg{};
        for (const auto& c : cells) {
          if (c.state != s) continue;
          const double tp = throughput(c.stats);
          by_alg[static_cast<std::size_t>(c.algorithm)] = tp;
          if (tp > best_tp) {
            best_tp = tp;
            best_alg = c.algorithm;
          }
          if (static_cast<int>(c.algorithm) == chosen) rl_tp = tp;
        }
        const double ratio = best_tp > 0.0 ? rl_tp / best_tp : 1.0;
        comparison_csv += detail::csv_join(
            {std::to_string(rep), std::to_string(s), phase_label(env, s, case1),
             name(static_cast<RoutingAlgorithm>(chosen)), detail::format_g6(rl_tp),
             name(best_alg), detail::format_g6(best_tp), detail::format_g6(ratio),
             detail::format_g6(by_alg[0]), detail::format_g6(by_alg[1]),
             detail::format_g6(by_alg[2]), detail::format_g6(by_alg[3])});
        comparison_csv += '\n';
      }
    } catch (const std::exception&) {
      res.ok = false;
      res.manifest.failed_seeds.push_back(seed);
    }
  }

  std::string rewards_csv = "rep,episode,reward\n";
  for (std::size_t r = 0; r < returns_per_rep.size(); ++r)
    for (std::size_t e = 0; e < returns_per_rep[r].size(); ++e) {
      rewards_csv += detail::csv_join({std::to_string(r), std::to_string(e),
                                       detail::format_g6(returns_per_rep[r][e])});
      rewards_csv += '\n';
    }
  dir.write(res.manifest, "rewards.csv", rewards_csv);

  std::string summary_csv = "episode,mean,stddev\n";
  if (!returns_per_rep.empty()) {
    const std::size_t episodes = returns_per_rep.front().size();
    for (std::size_t e = 0; e < episodes; ++e) {
      double sum = 0.0;
      for (const auto& r : returns_per_rep) sum += r[e];
      const double mean = sum / static_cast<double>(returns_per_rep.size());
      double var = 0.0;
      for (const auto& r : returns_per_rep) var += (r[e] - mean) * (r[e] - mean);
      var /= static_cast<double>(returns_per_rep.size());
      summary_csv += detail::csv_join({std::to_string(e), detail::format_g6(mean),
                                       detail::format_g6(std::sqrt(var))});
      summary_csv += '\n';
    }
  }
  dir.write(res.manifest, "rewards_summary.csv", summary_csv);
  dir.write(res.manifest, "comparison.csv", comparison_csv);
  dir.write_manifest(res.manifest);
  return res;
}

}  // namespace nocsim
