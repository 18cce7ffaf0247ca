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

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "nocsim/nocsim.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> reps;
  std::optional<int> jobs;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required) {
  auto* c = cmd->add_option("--config", opts.config_path, "experiment config (JSON)");
  if (config_required) c->required();
  cmd->add_option("--seed", opts.seed, "override master_seed");
  cmd->add_option("--out", opts.out, "override output directory");
  cmd->add_option("--reps", opts.reps, "override repetitions");
  cmd->add_option("--jobs", opts.jobs, "worker threads for fitness evaluation");
}

nocsim::ExperimentConfig load_with_overrides(const CommonOpts& opts) {
  nocsim::ExperimentConfig cfg = nocsim::load_experiment_config(opts.config_path);
  if (opts.seed) cfg.master_seed = *opts.seed;
  if (opts.out) cfg.out_dir = *opts.out;
  if (opts.reps) cfg.repetitions = *opts.reps;
  if (opts.jobs) cfg.jobs = *opts.jobs;
  return cfg;
}

int report(const nocsim::ExperimentResult& res) {
  std::cout << "wrote " << res.manifest.artifacts.size() + 1 << " files to "
            << res.out_dir << "\n";
  if (!res.ok) {
    std::cerr << "failed repetition seeds:";
    for (auto s : res.manifest.failed_seeds) std::cerr << ' ' << s;
    std::cerr << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cycle-level 2-D mesh NoC simulator with RL routing selection "
               "and EA virtual-channel allocation"};
  app.require_subcommand(1);

  // simulate: one measurement window, WindowStats as JSON on stdout.
  auto* sim_cmd = app.add_subcommand("simulate", "run a single traffic window");
  CommonOpts sim_opts;
  add_common(sim_cmd, sim_opts, false);
  int radix = 8, vc_default = 4, depth = 4, packet_length = 5;
  std::int64_t warmup = 1000, measure = 10000, stall = 2000;
  double rate = 0.1;
  std::string pattern = "uniform_random", routing = "xy";
  sim_cmd->add_option("--radix", radix, "mesh radix k");
  sim_cmd->add_option("--vc", vc_default, "VCs per input port");
  sim_cmd->add_option("--depth", depth, "flits per VC buffer");
  sim_cmd->add_option("--packet-length", packet_length, "flits per packet");
  sim_cmd->add_option("--warmup", warmup, "warmup cycles");
  sim_cmd->add_option("--measure", measure, "measured cycles");
  sim_cmd->add_option("--stall", stall, "deadlock stall threshold");
  sim_cmd->add_option("--rate", rate, "offered load, flits/node/cycle");
  sim_cmd->add_option("--pattern", pattern, "traffic pattern");
  sim_cmd->add_option("--routing", routing, "routing algorithm");
  std::string sim_format = "json";
  sim_cmd->add_option("--format", sim_format, "output format: json or csv");

  auto* validate_cmd = app.add_subcommand("validate-config", "check a config file");
  CommonOpts validate_opts;
  add_common(validate_cmd, validate_opts, true);

  auto* baseline_cmd =
      app.add_subcommand("baseline-sweep", "fixed algorithms across all phases");
  CommonOpts baseline_opts;
  add_common(baseline_cmd, baseline_opts, true);

  auto* train_cmd = app.add_subcommand("train-rl", "train a tabular agent");
  CommonOpts train_opts;
  add_common(train_cmd, train_opts, true);

  auto* opt_cmd = app.add_subcommand("optimize-vc", "evolve a VC allocation");
  CommonOpts opt_opts;
  add_common(opt_cmd, opt_opts, true);

  auto* cost_cmd = app.add_subcommand("cost-ratio", "additional hardware cost, percent");
  double cost_baseline = 0.0, cost_system = 0.0;
  cost_cmd->add_option("--baseline", cost_baseline, "baseline cost")->required();
  cost_cmd->add_option("--system", cost_system, "system cost")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim_cmd->parsed()) {
      nocsim::SimConfig cfg;
      if (!sim_opts.config_path.empty()) {
        const auto j = nocsim::load_json_file(sim_opts.config_path);
        if (j.contains("sim")) cfg = nocsim::parse_sim_block(j.at("sim"), "sim");
      }
      if (sim_cmd->count("--radix")) cfg.mesh_radix = radix;
      if (sim_cmd->count("--vc")) cfg.vc_default = vc_default;
      if (sim_cmd->count("--depth")) cfg.vc_buffer_depth = depth;
      if (sim_cmd->count("--packet-length")) cfg.packet_length = packet_length;
      if (sim_cmd->count("--warmup")) cfg.warmup_cycles = warmup;
      if (sim_cmd->count("--measure")) cfg.measure_cycles = measure;
      if (sim_cmd->count("--stall")) cfg.stall_threshold = stall;
      if (sim_opts.seed) cfg.rng_seed = *sim_opts.seed;
      nocsim::NetworkState net = nocsim::build_network(cfg);
      net.set_routing(nocsim::parse_routing_algorithm(routing));
      const nocsim::TrafficSpec traffic{nocsim::parse_traffic_pattern(pattern),
                                        cfg.mesh_radix};
      const auto stats = net.run_window(traffic, rate);
      if (sim_format == "csv") {
        std::cout << nocsim::window_stats_csv_header() << "\n"
                  << nocsim::to_csv_row(stats) << "\n";
      } else if (sim_format == "json") {
        std::cout << nocsim::to_json(stats).dump(2) << "\n";
      } else {
        throw nocsim::ConfigError("simulate: --format must be json or csv");
      }
      return 0;
    }
    if (validate_cmd->parsed()) {
      nocsim::load_experiment_config(validate_opts.config_path);
      std::cout << "ok\n";
      return 0;
    }
    if (baseline_cmd->parsed())
      return report(nocsim::baseline_sweep(load_with_overrides(baseline_opts)));
    if (train_cmd->parsed()) {
      const auto cfg = load_with_overrides(train_opts);
      if (cfg.kind == nocsim::ExperimentKind::Case2VcEa)
        throw nocsim::ConfigError("train-rl: config kind must be case1_rl or case2_rl");
      return report(nocsim::run_experiment(cfg));
    }
    if (opt_cmd->parsed()) {
      const auto cfg = load_with_overrides(opt_opts);
      if (cfg.kind != nocsim::ExperimentKind::Case2VcEa)
        throw nocsim::ConfigError("optimize-vc: config kind must be case2_vc_ea");
      return report(nocsim::run_experiment(cfg));
    }
    if (cost_cmd->parsed()) {
      const double pct =
          nocsim::cost_ratio(nocsim::CostModel{cost_baseline, cost_system});
      std::cout << nocsim::detail::format_g6(pct) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
