// Copyright 2026 The hmarl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <string>

#include <catch2/catch_amalgamated.hpp>

#include "hmarl/config.hpp"

namespace hmarl {
namespace {

const char* kMinimal = R"({
  "env": {"name": "nonlinear-nav-2"},
  "planner": "hmarl",
  "rounds": 5,
  "seed": 3
})";

TEST_CASE("a minimal config fills every documented default") {
  const ExperimentConfig cfg = parse_config(kMinimal);
  CHECK_NOTHROW(cfg.validate());

  CHECK(cfg.env.kind == TransitionKind::kNonlinearNav2);
  CHECK(cfg.env.horizon == 10);
  CHECK(cfg.planner == PlannerKind::kHMarl);
  CHECK(cfg.rounds == 5);
  REQUIRE(cfg.seeds.size() == 1);
  CHECK(cfg.seeds[0] == 3);

  REQUIRE(cfg.policy_set.n_agents() == 2);
  for (int i = 0; i < 2; ++i) {
    REQUIRE(cfg.policy_set.menu_size(i) == 4);
    const double gains[] = {0.2, 0.5, 1.0, 2.0};
    for (int j = 0; j < 4; ++j) {
      CHECK(cfg.policy_set.menus[i][j].gain == gains[j]);
      CHECK(cfg.policy_set.menus[i][j].goal == cfg.env.rewards.goals(i));
      CHECK(cfg.policy_set.menus[i][j].action_limit == 1.0);
    }
  }

  CHECK(cfg.hallucination.z == 5);
  CHECK(cfg.hallucination.eta_mode == EtaMode::kUniformSpaced);
  REQUIRE(cfg.hallucination.coordinate_mask.size() == 3);
  CHECK(cfg.hallucination.coordinate_mask[0] == false);
  CHECK(cfg.hallucination.coordinate_mask[1] == false);
  CHECK(cfg.hallucination.coordinate_mask[2] == true);
  CHECK(cfg.hallucination.episodes == 2);
  CHECK(cfg.hallucination.beta_schedule.kind == BetaKind::kConstant);
  CHECK(cfg.hallucination.beta_schedule.value == 1.0);
  CHECK(cfg.hallucination.beta_schedule.delta == 0.1);
  CHECK((cfg.hallucination.noise_std.array() == cfg.env.noise_std.array()).all());
  CHECK(cfg.hallucination.rollout_mode == RolloutMode::kGreedyStep);

  REQUIRE(cfg.gp.kernels.size() == 3);
  for (const KernelSpec& k : cfg.gp.kernels) {
    CHECK(k.kind == KernelKind::kSquaredExponential);
    REQUIRE(k.lengthscales.size() == 5);
    CHECK((k.lengthscales.array() == 0.5).all());
    CHECK(k.signal_variance == 0.05);
  }
  CHECK(cfg.gp.noise_variance == 1e-4);

  CHECK(cfg.cce.iterations == 10000);
  CHECK(!cfg.cce.learning_rate.has_value());
  CHECK(cfg.cce.target_eps == 0.0);

  CHECK(cfg.out_dir == "out");
  CHECK(cfg.timing == false);
  CHECK(cfg.true_value_episodes == 200);
  CHECK(cfg.threads == 1);
  CHECK(cfg.parallel_seeds == false);
}

TEST_CASE("full override config round-trips every knob") {
  const ExperimentConfig cfg = parse_config(R"({
    "env": {
      "name": "grid-2",
      "horizon": 15,
      "noise_std": [0.1, 0.2, 0.3],
      "initial_state": [0.0, 0.1, -0.1],
      "goals": [1.0, -1.0],
      "step_size": 0.2,
      "coupling": 0.3,
      "attraction": 1.5,
      "lambda1": 0.4,
      "lambda2": 0.6,
      "rho": 0.1,
      "reward_bound": 9.0
    },
    "policy_set": {"gains": [[0.5], [1.0, 2.0]], "action_limit": 0.8},
    "planner": "oracle",
    "rounds": 7,
    "hallucination": {
      "z": 9,
      "eta_mode": "uniform-random",
      "coordinate_mask": [true, true, false],
      "episodes": 4,
      "beta": {"kind": "log-growth", "value": 2.0, "delta": 0.05},
      "noise_std": 0.0,
      "rollout_mode": "trajectory-beam"
    },
    "gp": {
      "kernel": ["se", "matern52", "se"],
      "lengthscale": 0.3,
      "signal_variance": 0.2,
      "noise_variance": 1e-6
    },
    "cce": {"iterations": 500, "learning_rate": 0.1, "target_eps": 0.01},
    "seeds": [4, 5, 6],
    "output": {"directory": "results", "timing": true},
    "true_value_episodes": 50,
    "threads": 4,
    "parallel_seeds": true
  })");

  CHECK(cfg.env.kind == TransitionKind::kGrid2);
  CHECK(cfg.env.horizon == 15);
  CHECK(cfg.env.noise_std(0) == 0.1);
  CHECK(cfg.env.noise_std(2) == 0.3);
  CHECK(cfg.env.initial_state(1) == 0.1);
  CHECK(cfg.env.rewards.goals(0) == 1.0);
  CHECK(cfg.env.step_size == 0.2);
  CHECK(cfg.env.coupling == 0.3);
  CHECK(cfg.env.attraction == 1.5);
  CHECK(cfg.env.rewards.lambda1 == 0.4);
  CHECK(cfg.env.rewards.lambda2 == 0.6);
  CHECK(cfg.env.rewards.rho == 0.1);
  CHECK(cfg.env.reward_bound == 9.0);

  REQUIRE(cfg.policy_set.menu_size(0) == 1);
  REQUIRE(cfg.policy_set.menu_size(1) == 2);
  CHECK(cfg.policy_set.menus[0][0].gain == 0.5);
  CHECK(cfg.policy_set.menus[1][1].gain == 2.0);
  CHECK(cfg.policy_set.menus[1][0].action_limit == 0.8);

  CHECK(cfg.planner == PlannerKind::kOracle);
  CHECK(cfg.rounds == 7);

  CHECK(cfg.hallucination.z == 9);
  CHECK(cfg.hallucination.eta_mode == EtaMode::kUniformRandom);
  CHECK(cfg.hallucination.coordinate_mask[0] == true);
  CHECK(cfg.hallucination.coordinate_mask[2] == false);
  CHECK(cfg.hallucination.episodes == 4);
  CHECK(cfg.hallucination.beta_schedule.kind == BetaKind::kLogGrowth);
  CHECK(cfg.hallucination.beta_schedule.value == 2.0);
  CHECK(cfg.hallucination.beta_schedule.delta == 0.05);
  CHECK((cfg.hallucination.noise_std.array() == 0.0).all());
  CHECK(cfg.hallucination.rollout_mode == RolloutMode::kTrajectoryBeam);

  CHECK(cfg.gp.kernels[0].kind == KernelKind::kSquaredExponential);
  CHECK(cfg.gp.kernels[1].kind == KernelKind::kMatern52);
  CHECK((cfg.gp.kernels[2].lengthscales.array() == 0.3).all());
  CHECK(cfg.gp.kernels[0].signal_variance == 0.2);
  CHECK(cfg.gp.noise_variance == 1e-6);

  CHECK(cfg.cce.iterations == 500);
  REQUIRE(cfg.cce.learning_rate.has_value());
  CHECK(*cfg.cce.learning_rate == 0.1);
  CHECK(cfg.cce.target_eps == 0.01);

  REQUIRE(cfg.seeds.size() == 3);
  CHECK(cfg.seeds[2] == 6);
  CHECK(cfg.out_dir == "results");
  CHECK(cfg.timing == true);
  CHECK(cfg.true_value_episodes == 50);
  CHECK(cfg.threads == 4);
  CHECK(cfg.parallel_seeds == true);
}

TEST_CASE("scalar shorthands broadcast") {
  const ExperimentConfig cfg = parse_config(R"({
    "env": {"name": "nonlinear-nav-2", "noise_std": 0.02},
    "policy_set": {"gains": [0.5, 2.0]},
    "planner": "predmean",
    "rounds": 1,
    "gp": {"kernel": "matern52", "lengthscale": [1, 2, 3, 4, 5]},
    "cce": {"learning_rate": "auto"},
    "seed": 0
  })");
  CHECK((cfg.env.noise_std.array() == 0.02).all());
  CHECK(cfg.policy_set.menu_size(0) == 2);
  CHECK(cfg.policy_set.menu_size(1) == 2);
  CHECK(cfg.policy_set.menus[1][0].gain == 0.5);
  CHECK(cfg.planner == PlannerKind::kPredMean);
  for (const KernelSpec& k : cfg.gp.kernels) {
    CHECK(k.kind == KernelKind::kMatern52);
    CHECK(k.lengthscales(4) == 5.0);
  }
  CHECK(!cfg.cce.learning_rate.has_value());
}

TEST_CASE("required keys and bounds are enforced") {
  CHECK_THROWS_WITH(parse_config(R"({"planner":"hmarl","rounds":1,"seed":0})"),
                    "missing required key: env");
  CHECK_THROWS_WITH(
      parse_config(R"({"env":{},"planner":"hmarl","rounds":1,"seed":0})"),
      "missing required key: env.name");
  CHECK_THROWS_WITH(
      parse_config(
          R"({"env":{"name":"mars"},"planner":"hmarl","rounds":1,"seed":0})"),
      "env.name must be \"nonlinear-nav-2\" or \"grid-2\"");
  CHECK_THROWS_WITH(
      parse_config(R"({"env":{"name":"grid-2"},"rounds":1,"seed":0})"),
      "missing required key: planner");
  CHECK_THROWS_WITH(
      parse_config(
          R"({"env":{"name":"grid-2"},"planner":"zen","rounds":1,"seed":0})"),
      "planner must be one of hmarl|predmean|oracle");
  CHECK_THROWS_WITH(
      parse_config(R"({"env":{"name":"grid-2"},"planner":"hmarl","seed":0})"),
      "missing required key: rounds");
  CHECK_THROWS_WITH(
      parse_config(
          R"({"env":{"name":"grid-2"},"planner":"hmarl","rounds":0,"seed":0})"),
      "rounds must be >= 1");
  CHECK_THROWS_WITH(
      parse_config(R"({"env":{"name":"grid-2"},"planner":"hmarl","rounds":1})"),
      "missing required key: seed");
  CHECK_THROWS_WITH(
      parse_config(
          R"({"env":{"name":"grid-2"},"planner":"hmarl","rounds":1,"seed":1,"seeds":[2]})"),
      "use either seed or seeds, not both");
  CHECK_THROWS_WITH(
      parse_config(
          R"({"env":{"name":"grid-2"},"planner":"hmarl","rounds":1,"seeds":[]})"),
      "seeds must be a non-empty array");
  CHECK_THROWS_AS(
      parse_config(
          R"({"env":{"name":"grid-2"},"planner":"hmarl","rounds":1,"seed":-4})"),
      ConfigError);
}

TEST_CASE("unknown keys are named with their full path") {
  CHECK_THROWS_WITH(
      parse_config(
          R"({"zz":1,"env":{"name":"grid-2"},"planner":"hmarl","rounds":1,"seed":0})"),
      "unknown key: zz");
  CHECK_THROWS_WITH(
      parse_config(
          R"({"env":{"name":"grid-2","zz":1},"planner":"hmarl","rounds":1,"seed":0})"),
      "unknown key: env.zz");
  CHECK_THROWS_WITH(
      parse_config(
          R"({"env":{"name":"grid-2"},"hallucination":{"zeta":3},"planner":"hmarl","rounds":1,"seed":0})"),
      "unknown key: hallucination.zeta");
}

TEST_CASE("malformed documents are reported as parse errors") {
  CHECK_THROWS_AS(parse_config("{nope"), ConfigError);
  CHECK_THROWS_WITH(parse_config("{nope"),
                    Catch::Matchers::StartsWith("config parse error"));
  CHECK_THROWS_WITH(parse_config("[1,2]"), "config root must be an object");
}

TEST_CASE("value validation catches out-of-range settings") {
  auto with_base = [](const std::string& fragment) {
    return std::string(R"({"env":{"name":"nonlinear-nav-2"},"planner":"hmarl","rounds":1,"seed":0,)") +
           fragment + "}";
  };
  CHECK_THROWS_WITH(
      parse_config(
          R"({"env":{"name":"nonlinear-nav-2","noise_std":-0.1},"planner":"hmarl","rounds":1,"seed":0})"),
      "env.noise_std must be >= 0");
  CHECK_THROWS_WITH(
      parse_config(
          R"({"env":{"name":"nonlinear-nav-2","rho":0},"planner":"hmarl","rounds":1,"seed":0})"),
      "env.rho must be > 0");
  CHECK_THROWS_WITH(
      parse_config(
          R"({"env":{"name":"nonlinear-nav-2","noise_std":[0.1,0.2]},"planner":"hmarl","rounds":1,"seed":0})"),
      "env.noise_std must have 3 entries");
  CHECK_THROWS_WITH(
      parse_config(
          R"({"env":{"name":"nonlinear-nav-2","horizon":0},"planner":"hmarl","rounds":1,"seed":0})"),
      "env.horizon must be >= 1");
  CHECK_THROWS_WITH(parse_config(with_base(R"("policy_set":{"gains":[]})")),
                    "policy_set.gains must be a non-empty array");
  CHECK_THROWS_WITH(parse_config(with_base(R"("policy_set":{"gains":[[0.5]]})")),
                    "policy_set.gains must have one list per agent");
  CHECK_THROWS_WITH(parse_config(with_base(R"("policy_set":{"action_limit":0})")),
                    "policy_set.action_limit must be > 0");
  CHECK_THROWS_WITH(parse_config(with_base(R"("hallucination":{"z":0})")),
                    "hallucination.z must be >= 1");
  CHECK_THROWS_WITH(parse_config(with_base(R"("hallucination":{"episodes":0})")),
                    "hallucination.episodes must be >= 1");
  CHECK_THROWS_WITH(
      parse_config(with_base(R"("hallucination":{"coordinate_mask":[true,false]})")),
      "hallucination.coordinate_mask must have 3 booleans");
  CHECK_THROWS_WITH(
      parse_config(with_base(R"("hallucination":{"eta_mode":"diag"})")),
      "hallucination.eta_mode must be \"uniform-spaced\" or \"uniform-random\"");
  CHECK_THROWS_WITH(
      parse_config(with_base(R"("hallucination":{"rollout_mode":"mcts"})")),
      "hallucination.rollout_mode must be \"greedy-step\" or \"trajectory-beam\"");
  CHECK_THROWS_WITH(
      parse_config(with_base(R"("hallucination":{"beta":{"kind":"linear"}})")),
      "hallucination.beta.kind must be \"constant\" or \"log-growth\"");
  CHECK_THROWS_WITH(
      parse_config(with_base(R"("hallucination":{"beta":{"value":0}})")),
      "hallucination.beta.value must be > 0");
  CHECK_THROWS_WITH(
      parse_config(with_base(R"("hallucination":{"beta":{"delta":1.0}})")),
      "hallucination.beta.delta must be in (0,1)");
  CHECK_THROWS_WITH(parse_config(with_base(R"("gp":{"kernel":"rbf"})")),
                    "gp.kernel must be \"se\" or \"matern52\"");
  CHECK_THROWS_WITH(parse_config(with_base(R"("gp":{"kernel":["se"]})")),
                    "gp.kernel must have one entry per state coordinate");
  CHECK_THROWS_WITH(parse_config(with_base(R"("gp":{"kernel":5})")),
                    "gp.kernel must be a string or array of strings");
  CHECK_THROWS_WITH(parse_config(with_base(R"("gp":{"lengthscale":0})")),
                    "gp.lengthscale must be > 0");
  CHECK_THROWS_WITH(parse_config(with_base(R"("gp":{"signal_variance":0})")),
                    "gp.signal_variance must be > 0");
  CHECK_THROWS_WITH(parse_config(with_base(R"("gp":{"noise_variance":0})")),
                    "gp.noise_variance must be > 0");
  CHECK_THROWS_WITH(parse_config(with_base(R"("cce":{"iterations":0})")),
                    "cce.iterations must be >= 1");
  CHECK_THROWS_WITH(parse_config(with_base(R"("cce":{"learning_rate":"fast"})")),
                    "cce.learning_rate must be \"auto\" or a number");
  CHECK_THROWS_WITH(parse_config(with_base(R"("cce":{"learning_rate":0})")),
                    "cce.learning_rate must be > 0");
  CHECK_THROWS_WITH(parse_config(with_base(R"("cce":{"target_eps":-1})")),
                    "cce.target_eps must be >= 0");
  CHECK_THROWS_WITH(parse_config(with_base(R"("true_value_episodes":0)")),
                    "true_value_episodes must be >= 1");
  CHECK_THROWS_WITH(parse_config(with_base(R"("threads":-1)")),
                    "threads must be >= 0");
  CHECK_THROWS_WITH(parse_config(with_base(R"("output":{"timing":"yes"})")),
                    "output.timing must be a boolean");
}

TEST_CASE("parsed configs pass full experiment validation") {
  const ExperimentConfig cfg = parse_config(R"({
    "env": {"name": "grid-2"},
    "policy_set": {"gains": [0.5, 2.0]},
    "planner": "oracle",
    "rounds": 2,
    "seed": 9
  })");
  CHECK_NOTHROW(cfg.validate());
}

}  // namespace
}  // namespace hmarl
