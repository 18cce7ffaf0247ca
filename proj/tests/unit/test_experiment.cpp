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

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "nocsim/experiment.hpp"

using namespace nocsim;
namespace fs = std::filesystem;

namespace {

nlohmann::json tiny_case1() {
  return nlohmann::json{
      {"kind", "case1_rl"},
      {"sim",
       {{"mesh_radix", 2}, {"warmup_cycles", 20}, {"measure_cycles", 200}}},
      {"env", {{"case", 1}, {"pattern", "uniform_random"}}},
      {"agent", {{"algorithm", "q_learning"}, {"episodes", 2}}},
      {"out", "unused"},
      {"master_seed", 7},
      {"repetitions", 2}};
}

nlohmann::json tiny_vc_ea() {
  return nlohmann::json{
      {"kind", "case2_vc_ea"},
      {"sim",
       {{"mesh_radix", 2}, {"warmup_cycles", 20}, {"measure_cycles", 200}}},
      {"optimizer",
       {{"algorithm", "sga"}, {"generations", 2}, {"population", 4},
        {"rate", 0.3}, {"pattern", "tornado"}}},
      {"out", "unused"},
      {"master_seed", 9},
      {"repetitions", 1}};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("nocsim_test_" + tag)) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("cost ratio matches the worked percentages") {
  CHECK(cost_ratio({16, 32}) == doctest::Approx(100.0));
  CHECK(cost_ratio({16, 64}) == doctest::Approx(300.0));
  CHECK(cost_ratio({16, 16}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(cost_ratio({0, 16}), ContractError);
  CHECK_THROWS_AS(cost_ratio({-4, 16}), ContractError);
}

TEST_CASE("config parsing is strict about keys and kinds") {
  CHECK_NOTHROW(parse_experiment_config(tiny_case1()));

  SUBCASE("unknown keys are reported with their path") {
    auto j = tiny_case1();
    j["sim"]["mesh_size"] = 4;  // typo for mesh_radix
    try {
      parse_experiment_config(j);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("sim.mesh_size") != std::string::npos);
    }
  }
  SUBCASE("bad kind") {
    auto j = tiny_case1();
    j["kind"] = "case3";
    CHECK_THROWS_AS(parse_experiment_config(j), ConfigError);
  }
  SUBCASE("env case must match the kind") {
    auto j = tiny_case1();
    j["env"]["case"] = 2;
    CHECK_THROWS_AS(parse_experiment_config(j), ConfigError);
  }
  SUBCASE("rl kinds refuse an optimizer block and vice versa") {
    auto j = tiny_case1();
    j["optimizer"] = {{"algorithm", "sga"}};
    CHECK_THROWS_AS(parse_experiment_config(j), ConfigError);
    auto v = tiny_vc_ea();
    v["agent"] = {{"algorithm", "sarsa"}};
    CHECK_THROWS_AS(parse_experiment_config(v), ConfigError);
  }
  SUBCASE("case 2 needs exactly seven patterns") {
    nlohmann::json j = tiny_case1();
    j["kind"] = "case2_rl";
    j["env"] = {{"case", 2}, {"rate", 0.5}, {"patterns", {"tornado", "shuffle"}}};
    CHECK_THROWS_AS(parse_experiment_config(j), ConfigError);
    j["env"]["patterns"] = {"uniform_random", "tornado", "bit_reverse",
                            "bit_rotation", "shuffle", "transpose", "neighbor"};
    CHECK_NOTHROW(parse_experiment_config(j));
  }
  SUBCASE("wrong types carry the field path") {
    auto j = tiny_case1();
    j["agent"]["alpha"] = "fast";
    try {
      parse_experiment_config(j);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("agent.alpha") != std::string::npos);
    }
  }
}

TEST_CASE("rl experiments emit a complete, reproducible artifact set") {
  TempDir dir("rl");
  auto j = tiny_case1();
  auto cfg = parse_experiment_config(j);
  cfg.out_dir = (dir.path / "a").string();
  const auto res = run_experiment(cfg);
  CHECK(res.ok);
  CHECK(res.manifest.seeds == std::vector<std::uint64_t>{7, 8});

  // every artifact exists and is referenced exactly once
  std::set<std::string> listed(res.manifest.artifacts.begin(),
                               res.manifest.artifacts.end());
  CHECK(listed.size() == res.manifest.artifacts.size());
  std::set<std::string> on_disk;
  for (const auto& entry : fs::directory_iterator(cfg.out_dir))
    on_disk.insert(entry.path().filename().string());
  std::set<std::string> expected = listed;
  expected.insert("manifest.json");
  CHECK(on_disk == expected);
  CHECK(listed.count("rewards.csv"));
  CHECK(listed.count("rewards_summary.csv"));
  CHECK(listed.count("comparison.csv"));
  CHECK(listed.count("trace_rep0.csv"));
  CHECK(listed.count("trace_rep1.csv"));
  CHECK(listed.count("policy_rep0.json"));

  // trace has episodes*phases rows plus the header
  const auto trace = slurp(fs::path(cfg.out_dir) / "trace_rep0.csv");
  CHECK(std::count(trace.begin(), trace.end(), '\n') == 2 * 9 + 1);
  CHECK(trace.rfind("episode,step,state,action,reward\n", 0) == 0);

  // byte-for-byte reproducibility of a rerun
  auto cfg2 = cfg;
  cfg2.out_dir = (dir.path / "b").string();
  const auto res2 = run_experiment(cfg2);
  REQUIRE(res2.ok);
  for (const auto& f : res.manifest.artifacts)
    CHECK(slurp(fs::path(cfg.out_dir) / f) == slurp(fs::path(cfg2.out_dir) / f));
}

TEST_CASE("zero training episodes still produce a valid artifact set") {
  TempDir dir("rl0");
  auto j = tiny_case1();
  j["agent"]["episodes"] = 0;
  j["repetitions"] = 1;
  auto cfg = parse_experiment_config(j);
  cfg.out_dir = (dir.path / "zero").string();
  const auto res = run_experiment(cfg);
  CHECK(res.ok);
  CHECK(slurp(fs::path(cfg.out_dir) / "rewards.csv") == "rep,episode,reward\n");
  CHECK(slurp(fs::path(cfg.out_dir) / "trace_rep0.csv") ==
        "episode,step,state,action,reward\n");
  const auto policy =
      nlohmann::json::parse(slurp(fs::path(cfg.out_dir) / "policy_rep0.json"));
  for (const auto& a : policy.at("greedy_policy")) CHECK(a.get<int>() == 0);
}

TEST_CASE("baseline sweep covers the full state x algorithm grid") {
  TempDir dir("bl");
  auto cfg = parse_experiment_config(tiny_case1());
  cfg.out_dir = (dir.path / "sweep").string();
  cfg.repetitions = 1;
  const auto res = baseline_sweep(cfg);
  CHECK(res.ok);
  const auto csv = slurp(fs::path(cfg.out_dir) / "baseline_rep0.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9 * 4 + 1);  // case 1: 36 rows

  nlohmann::json j2 = tiny_case1();
  j2["kind"] = "case2_rl";
  j2["env"] = {{"case", 2}, {"rate", 0.5}};
  auto cfg2 = parse_experiment_config(j2);
  cfg2.out_dir = (dir.path / "sweep2").string();
  const auto res2 = baseline_sweep(cfg2);
  CHECK(res2.ok);
  const auto csv2 = slurp(fs::path(cfg2.out_dir) / "baseline_rep0.csv");
  CHECK(std::count(csv2.begin(), csv2.end(), '\n') == 7 * 4 + 1);  // case 2: 28 rows
  CHECK(csv2.find("tornado") != std::string::npos);
}

TEST_CASE("vc optimization runs write fitness history and the best genome") {
  TempDir dir("vc");
  auto cfg = parse_experiment_config(tiny_vc_ea());
  cfg.out_dir = (dir.path / "vc").string();
  const auto res = run_experiment(cfg);
  CHECK(res.ok);
  const auto csv = slurp(fs::path(cfg.out_dir) / "fitness_rep0.csv");
  CHECK(csv.rfind("generation,best,mean,worst\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2 + 1);

  const auto best = nlohmann::json::parse(slurp(fs::path(cfg.out_dir) / "best_rep0.json"));
  CHECK(best.at("genome").size() == 4);
  CHECK(best.at("allocation").size() == 4);
  CHECK(best.at("allocation").at(0).size() == 4);
  CHECK(best.at("vc_total") == 16);
}

TEST_CASE("resolved configs round-trip through the parser") {
  for (const auto& base : {tiny_case1(), tiny_vc_ea()}) {
    const auto cfg = parse_experiment_config(base);
    const auto again = parse_experiment_config(to_json(cfg));
    CHECK(again.kind == cfg.kind);
    CHECK(again.master_seed == cfg.master_seed);
    CHECK(again.repetitions == cfg.repetitions);
    CHECK(again.sim.mesh_radix == cfg.sim.mesh_radix);
    CHECK(to_json(again) == to_json(cfg));
  }
}

TEST_CASE("six significant digits everywhere") {
  CHECK(detail::format_g6(0.05) == "0.05");
  CHECK(detail::format_g6(1.0 / 3.0) == "0.333333");
  CHECK(detail::format_g6(4620.0 / 1000.0) == "4.62");
  CHECK(detail::format_g6(123456789.0) == "1.23457e+08");
}
