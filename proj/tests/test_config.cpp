#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "tempavg/config.hpp"

using namespace tempavg;
using nlohmann::json;

TEST_CASE("config round trip") {
  const json inputs[] = {
      json{{"protocol", "exhaustive"}, {"n", 2}},
      json{{"protocol", "labeled_flip_swap"}, {"n", 3}, {"deltas", {1e-3, 2e-3, 3e-3, 4e-3}}, {"repetitions", 7}},
      json{{"protocol", "group_randomization"}, {"n", 4}, {"deltas", 5e-4}, {"k_steps", 3}, {"seed", 99},
           {"noise_std", 1e-6}},
      json{{"protocol", "entanglement"}, {"n", 2}, {"computation", "c.json"}},
  };
  for (const auto& in : inputs) {
    const RunConfig a = parse_run_config(in);
    const RunConfig b = parse_run_config(to_json(a));
    CHECK(a == b);
    CHECK(to_json(a) == to_json(b));
  }
}

TEST_CASE("config rejects bad input") {
  CHECK_THROWS_AS(parse_run_config(json{{"protocol", "exhaustive"}, {"n", 2}, {"bogus", 1}}), ConfigError);
  CHECK_THROWS_AS(parse_run_config(json{{"n", 2}}), ConfigError);
  CHECK_THROWS_AS(parse_run_config(json{{"protocol", "nope"}, {"n", 2}}), ConfigError);
  CHECK_THROWS_AS(parse_run_config(json{{"protocol", "exhaustive"}, {"n", 13}}), ConfigError);
  CHECK_THROWS_AS(parse_run_config(json{{"protocol", "entanglement"}, {"n", 7}}), ConfigError);
  CHECK_THROWS_AS(parse_run_config(json{{"protocol", "exhaustive"}, {"n", 2.5}}), ConfigError);
  CHECK_THROWS_AS(parse_run_config(json{{"protocol", "exhaustive"}, {"n", 2}, {"deltas", 1.0}}), ConfigError);
  CHECK_THROWS_AS(parse_run_config(json{{"protocol", "exhaustive"}, {"n", 2}, {"repetitions", 0}}), ConfigError);
  CHECK_THROWS_AS(parse_run_config(json{{"protocol", "exhaustive"}, {"n", 2}, {"seed", -1}}), ConfigError);
  CHECK_THROWS_AS(parse_run_config(json::array()), ConfigError);
}

TEST_CASE("deltas expansion follows the register size") {
  RunConfig c = parse_run_config(json{{"protocol", "labeled_flip_swap"}, {"n", 3}, {"deltas", 2e-3}});
  CHECK(expanded_deltas(c) == std::vector<double>(4, 2e-3));
  c = parse_run_config(json{{"protocol", "entanglement"}, {"n", 2}, {"deltas", {1e-3, 2e-3}}});
  CHECK_THROWS_AS(expanded_deltas(c), DimensionError);
  c = parse_run_config(json{{"protocol", "flip_swap"}, {"n", 2}, {"deltas", {1e-3, 2e-3}}});
  CHECK(expanded_deltas(c).size() == 2);
}

TEST_CASE("computation file resolved relative to the config") {
  const auto dir = std::filesystem::temp_directory_path() / "tempavg_config_test";
  std::filesystem::create_directories(dir);
  Circuit comp(3);
  comp.add(Gate::cnot(0, 1));
  std::ofstream(dir / "comp.json") << circuit_to_json(comp).dump();
  std::ofstream(dir / "run.json") << json{{"protocol", "flip_swap"}, {"n", 3}, {"computation", "comp.json"}}.dump();
  const RunConfig c = load_run_config((dir / "run.json").string());
  CHECK(load_computation(c).n_qubits() == 3);

  std::ofstream(dir / "bad.json") << json{{"protocol", "flip_swap"}, {"n", 2}, {"computation", "comp.json"}}.dump();
  CHECK_THROWS_AS(load_computation(load_run_config((dir / "bad.json").string())), DimensionError);
  CHECK_THROWS_AS(load_run_config((dir / "missing.json").string()), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("build_plan uses choose_k when k_steps is absent") {
  const RunConfig c = parse_run_config(json{{"protocol", "fully_randomized_flip_swap"}, {"n", 3}, {"seed", 5}});
  const PreparationPlan p = build_plan(c);
  REQUIRE(p.k_steps);
  CHECK(*p.k_steps == choose_k(3));
  CHECK(p.seed == 5u);
  CHECK(build_plan(c).experiments.size() == p.experiments.size());
}
