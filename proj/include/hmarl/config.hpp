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

#ifndef HMARL_CONFIG_HPP_
#define HMARL_CONFIG_HPP_

#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hmarl/driver.hpp"

namespace hmarl {

/// Raised for malformed or invalid experiment configs; the runner maps it to
/// exit code 1 (all other failures are exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string join_path(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

inline void check_keys(const nlohmann::json& obj, const std::string& path,
                       std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError("unknown key: " + join_path(path, it.key()));
  }
}

inline const nlohmann::json* find(const nlohmann::json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

inline double get_number(const nlohmann::json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path + " must be a number");
  return v.get<double>();
}

inline int get_int(const nlohmann::json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path + " must be an integer");
  return v.get<int>();
}

inline std::uint64_t get_u64(const nlohmann::json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ConfigError(path + " must be a non-negative integer");
}

inline bool get_bool(const nlohmann::json& v, const std::string& path) {
  if (!v.is_boolean()) throw ConfigError(path + " must be a boolean");
  return v.get<bool>();
}

inline std::string get_string(const nlohmann::json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path + " must be a string");
  return v.get<std::string>();
}

inline Eigen::VectorXd get_vector(const nlohmann::json& v,
                                  const std::string& path, int size) {
  if (!v.is_array())
    throw ConfigError(path + " must be an array of " + std::to_string(size) +
                      " numbers");
  if (static_cast<int>(v.size()) != size)
    throw ConfigError(path + " must have " + std::to_string(size) +
                      " entries");
  Eigen::VectorXd out(size);
  int i = 0;
  for (const auto& e : v) out(i++) = get_number(e, path);
  return out;
}

inline Eigen::VectorXd get_scalar_or_vector(const nlohmann::json& v,
                                            const std::string& path, int size) {
  if (v.is_number())
    return Eigen::VectorXd::Constant(size, v.get<double>());
  return get_vector(v, path, size);
}

inline KernelKind parse_kernel_kind(const std::string& s,
                                    const std::string& path) {
  if (s == "se") return KernelKind::kSquaredExponential;
  if (s == "matern52") return KernelKind::kMatern52;
  throw ConfigError(path + " must be \"se\" or \"matern52\"");
}

}  // namespace detail

/// Parses and fully validates a JSON experiment config. Unknown keys are
/// rejected with their full path; absent optional keys take the documented
/// defaults.
inline ExperimentConfig parse_config(const std::string& text) {
  using nlohmann::json;
  json root;
  try {
    root = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be an object");
  detail::check_keys(root, "",
                     {"env", "policy_set", "planner", "rounds", "hallucination",
                      "gp", "cce", "seed", "seeds", "output",
                      "true_value_episodes", "threads", "parallel_seeds"});

  ExperimentConfig cfg;

  // env
  const json* env_j = detail::find(root, "env");
  if (!env_j) throw ConfigError("missing required key: env");
  if (!env_j->is_object()) throw ConfigError("env must be an object");
  detail::check_keys(*env_j, "env",
                     {"name", "horizon", "noise_std", "initial_state", "goals",
                      "step_size", "coupling", "attraction", "lambda1",
                      "lambda2", "rho", "reward_bound"});
  const json* name_j = detail::find(*env_j, "name");
  if (!name_j) throw ConfigError("missing required key: env.name");
  const std::string env_name = detail::get_string(*name_j, "env.name");
  if (env_name == "nonlinear-nav-2") {
    cfg.env = make_nonlinear_nav2();
  } else if (env_name == "grid-2") {
    cfg.env = make_grid2();
  } else {
    throw ConfigError("env.name must be \"nonlinear-nav-2\" or \"grid-2\"");
  }
  if (const json* v = detail::find(*env_j, "horizon")) {
    cfg.env.horizon = detail::get_int(*v, "env.horizon");
    if (cfg.env.horizon < 1) throw ConfigError("env.horizon must be >= 1");
  }
  if (const json* v = detail::find(*env_j, "noise_std")) {
    cfg.env.noise_std =
        detail::get_scalar_or_vector(*v, "env.noise_std", cfg.env.state_dim);
    if ((cfg.env.noise_std.array() < 0.0).any())
      throw ConfigError("env.noise_std must be >= 0");
  }
  if (const json* v = detail::find(*env_j, "initial_state"))
    cfg.env.initial_state =
        detail::get_vector(*v, "env.initial_state", cfg.env.state_dim);
  if (const json* v = detail::find(*env_j, "goals"))
    cfg.env.rewards.goals = detail::get_vector(*v, "env.goals", cfg.env.n_agents);
  if (const json* v = detail::find(*env_j, "step_size"))
    cfg.env.step_size = detail::get_number(*v, "env.step_size");
  if (const json* v = detail::find(*env_j, "coupling"))
    cfg.env.coupling = detail::get_number(*v, "env.coupling");
  if (const json* v = detail::find(*env_j, "attraction"))
    cfg.env.attraction = detail::get_number(*v, "env.attraction");
  if (const json* v = detail::find(*env_j, "lambda1"))
    cfg.env.rewards.lambda1 = detail::get_number(*v, "env.lambda1");
  if (const json* v = detail::find(*env_j, "lambda2"))
    cfg.env.rewards.lambda2 = detail::get_number(*v, "env.lambda2");
  if (const json* v = detail::find(*env_j, "rho")) {
    cfg.env.rewards.rho = detail::get_number(*v, "env.rho");
    if (!(cfg.env.rewards.rho > 0.0)) throw ConfigError("env.rho must be > 0");
  }
  if (const json* v = detail::find(*env_j, "reward_bound")) {
    cfg.env.reward_bound = detail::get_number(*v, "env.reward_bound");
    if (!(cfg.env.reward_bound > 0.0))
      throw ConfigError("env.reward_bound must be > 0");
  }

  // policy_set
  std::vector<std::vector<double>> gains(
      cfg.env.n_agents, std::vector<double>{0.2, 0.5, 1.0, 2.0});
  double action_limit = 1.0;
  if (const json* ps_j = detail::find(root, "policy_set")) {
    if (!ps_j->is_object()) throw ConfigError("policy_set must be an object");
    detail::check_keys(*ps_j, "policy_set", {"gains", "action_limit"});
    if (const json* v = detail::find(*ps_j, "gains")) {
      if (!v->is_array() || v->empty())
        throw ConfigError("policy_set.gains must be a non-empty array");
      if (v->front().is_array()) {
        if (static_cast<int>(v->size()) != cfg.env.n_agents)
          throw ConfigError("policy_set.gains must have one list per agent");
        gains.clear();
        for (const auto& per_agent : *v) {
          if (!per_agent.is_array() || per_agent.empty())
            throw ConfigError("policy_set.gains entries must be non-empty arrays");
          std::vector<double> g;
          for (const auto& e : per_agent)
            g.push_back(detail::get_number(e, "policy_set.gains"));
          gains.push_back(std::move(g));
        }
      } else {
        std::vector<double> g;
        for (const auto& e : *v)
          g.push_back(detail::get_number(e, "policy_set.gains"));
        gains.assign(cfg.env.n_agents, g);
      }
    }
    if (const json* v = detail::find(*ps_j, "action_limit")) {
      action_limit = detail::get_number(*v, "policy_set.action_limit");
      if (!(action_limit > 0.0))
        throw ConfigError("policy_set.action_limit must be > 0");
    }
  }
  cfg.policy_set.menus.clear();
  cfg.policy_set.menus.resize(cfg.env.n_agents);
  for (int i = 0; i < cfg.env.n_agents; ++i)
    for (double gain : gains[i])
      cfg.policy_set.menus[i].push_back(
          {gain, cfg.env.rewards.goals(i), action_limit});

  // planner
  const json* planner_j = detail::find(root, "planner");
  if (!planner_j) throw ConfigError("missing required key: planner");
  const std::string planner = detail::get_string(*planner_j, "planner");
  if (planner == "hmarl") {
    cfg.planner = PlannerKind::kHMarl;
  } else if (planner == "predmean") {
    cfg.planner = PlannerKind::kPredMean;
  } else if (planner == "oracle") {
    cfg.planner = PlannerKind::kOracle;
  } else {
    throw ConfigError("planner must be one of hmarl|predmean|oracle");
  }

  // rounds
  const json* rounds_j = detail::find(root, "rounds");
  if (!rounds_j) throw ConfigError("missing required key: rounds");
  cfg.rounds = detail::get_int(*rounds_j, "rounds");
  if (cfg.rounds < 1) throw ConfigError("rounds must be >= 1");

  // hallucination defaults: perturb only the shared coordinate.
  cfg.hallucination.z = 5;
  cfg.hallucination.eta_mode = EtaMode::kUniformSpaced;
  cfg.hallucination.coordinate_mask.assign(cfg.env.state_dim, false);
  cfg.hallucination.coordinate_mask[cfg.env.n_agents] = true;
  cfg.hallucination.episodes = 2;
  cfg.hallucination.beta_schedule = BetaSchedule{BetaKind::kConstant, 1.0, 0.1};
  cfg.hallucination.noise_std = cfg.env.noise_std;
  cfg.hallucination.rollout_mode = RolloutMode::kGreedyStep;
  if (const json* h_j = detail::find(root, "hallucination")) {
    if (!h_j->is_object()) throw ConfigError("hallucination must be an object");
    detail::check_keys(*h_j, "hallucination",
                       {"z", "eta_mode", "coordinate_mask", "episodes", "beta",
                        "noise_std", "rollout_mode"});
    if (const json* v = detail::find(*h_j, "z")) {
      cfg.hallucination.z = detail::get_int(*v, "hallucination.z");
      if (cfg.hallucination.z < 1)
        throw ConfigError("hallucination.z must be >= 1");
    }
    if (const json* v = detail::find(*h_j, "eta_mode")) {
      const std::string mode = detail::get_string(*v, "hallucination.eta_mode");
      if (mode == "uniform-spaced") {
        cfg.hallucination.eta_mode = EtaMode::kUniformSpaced;
      } else if (mode == "uniform-random") {
        cfg.hallucination.eta_mode = EtaMode::kUniformRandom;
      } else {
        throw ConfigError(
            "hallucination.eta_mode must be \"uniform-spaced\" or "
            "\"uniform-random\"");
      }
    }
    if (const json* v = detail::find(*h_j, "coordinate_mask")) {
      if (!v->is_array() ||
          static_cast<int>(v->size()) != cfg.env.state_dim)
        throw ConfigError("hallucination.coordinate_mask must have " +
                          std::to_string(cfg.env.state_dim) + " booleans");
      cfg.hallucination.coordinate_mask.clear();
      for (const auto& e : *v)
        cfg.hallucination.coordinate_mask.push_back(
            detail::get_bool(e, "hallucination.coordinate_mask"));
    }
    if (const json* v = detail::find(*h_j, "episodes")) {
      cfg.hallucination.episodes = detail::get_int(*v, "hallucination.episodes");
      if (cfg.hallucination.episodes < 1)
        throw ConfigError("hallucination.episodes must be >= 1");
    }
    if (const json* v = detail::find(*h_j, "beta")) {
      if (!v->is_object())
        throw ConfigError("hallucination.beta must be an object");
      detail::check_keys(*v, "hallucination.beta", {"kind", "value", "delta"});
      if (const json* k = detail::find(*v, "kind")) {
        const std::string kind = detail::get_string(*k, "hallucination.beta.kind");
        if (kind == "constant") {
          cfg.hallucination.beta_schedule.kind = BetaKind::kConstant;
        } else if (kind == "log-growth") {
          cfg.hallucination.beta_schedule.kind = BetaKind::kLogGrowth;
        } else {
          throw ConfigError(
              "hallucination.beta.kind must be \"constant\" or \"log-growth\"");
        }
      }
      if (const json* val = detail::find(*v, "value")) {
        cfg.hallucination.beta_schedule.value =
            detail::get_number(*val, "hallucination.beta.value");
        if (!(cfg.hallucination.beta_schedule.value > 0.0))
          throw ConfigError("hallucination.beta.value must be > 0");
      }
      if (const json* d = detail::find(*v, "delta")) {
        cfg.hallucination.beta_schedule.delta =
            detail::get_number(*d, "hallucination.beta.delta");
        if (!(cfg.hallucination.beta_schedule.delta > 0.0) ||
            !(cfg.hallucination.beta_schedule.delta < 1.0))
          throw ConfigError("hallucination.beta.delta must be in (0,1)");
      }
    }
    if (const json* v = detail::find(*h_j, "noise_std")) {
      cfg.hallucination.noise_std = detail::get_scalar_or_vector(
          *v, "hallucination.noise_std", cfg.env.state_dim);
      if ((cfg.hallucination.noise_std.array() < 0.0).any())
        throw ConfigError("hallucination.noise_std must be >= 0");
    }
    if (const json* v = detail::find(*h_j, "rollout_mode")) {
      const std::string mode =
          detail::get_string(*v, "hallucination.rollout_mode");
      if (mode == "greedy-step") {
        cfg.hallucination.rollout_mode = RolloutMode::kGreedyStep;
      } else if (mode == "trajectory-beam") {
        cfg.hallucination.rollout_mode = RolloutMode::kTrajectoryBeam;
      } else {
        throw ConfigError(
            "hallucination.rollout_mode must be \"greedy-step\" or "
            "\"trajectory-beam\"");
      }
    }
  }

  // gp defaults: SE kernel, lengthscale 0.5 on every input, sv 0.05.
  const int d = cfg.input_dim();
  {
    KernelSpec k;
    k.kind = KernelKind::kSquaredExponential;
    k.lengthscales = Eigen::VectorXd::Constant(d, 0.5);
    k.signal_variance = 0.05;
    cfg.gp.kernels.assign(cfg.env.state_dim, k);
    cfg.gp.noise_variance = 1e-4;
  }
  if (const json* gp_j = detail::find(root, "gp")) {
    if (!gp_j->is_object()) throw ConfigError("gp must be an object");
    detail::check_keys(*gp_j, "gp",
                       {"kernel", "lengthscale", "signal_variance",
                        "noise_variance"});
    if (const json* v = detail::find(*gp_j, "kernel")) {
      if (v->is_string()) {
        const KernelKind kind = detail::parse_kernel_kind(
            v->get<std::string>(), "gp.kernel");
        for (KernelSpec& k : cfg.gp.kernels) k.kind = kind;
      } else if (v->is_array()) {
        if (static_cast<int>(v->size()) != cfg.env.state_dim)
          throw ConfigError("gp.kernel must have one entry per state coordinate");
        int c = 0;
        for (const auto& e : *v)
          cfg.gp.kernels[c++].kind = detail::parse_kernel_kind(
              detail::get_string(e, "gp.kernel"), "gp.kernel");
      } else {
        throw ConfigError("gp.kernel must be a string or array of strings");
      }
    }
    if (const json* v = detail::find(*gp_j, "lengthscale")) {
      const Eigen::VectorXd ls =
          detail::get_scalar_or_vector(*v, "gp.lengthscale", d);
      if ((ls.array() <= 0.0).any())
        throw ConfigError("gp.lengthscale must be > 0");
      for (KernelSpec& k : cfg.gp.kernels) k.lengthscales = ls;
    }
    if (const json* v = detail::find(*gp_j, "signal_variance")) {
      const double sv = detail::get_number(*v, "gp.signal_variance");
      if (!(sv > 0.0)) throw ConfigError("gp.signal_variance must be > 0");
      for (KernelSpec& k : cfg.gp.kernels) k.signal_variance = sv;
    }
    if (const json* v = detail::find(*gp_j, "noise_variance")) {
      cfg.gp.noise_variance = detail::get_number(*v, "gp.noise_variance");
      if (!(cfg.gp.noise_variance > 0.0))
        throw ConfigError("gp.noise_variance must be > 0");
    }
  }

  // cce
  cfg.cce = HedgeConfig{};
  if (const json* cce_j = detail::find(root, "cce")) {
    if (!cce_j->is_object()) throw ConfigError("cce must be an object");
    detail::check_keys(*cce_j, "cce",
                       {"iterations", "learning_rate", "target_eps"});
    if (const json* v = detail::find(*cce_j, "iterations")) {
      cfg.cce.iterations = detail::get_int(*v, "cce.iterations");
      if (cfg.cce.iterations < 1)
        throw ConfigError("cce.iterations must be >= 1");
    }
    if (const json* v = detail::find(*cce_j, "learning_rate")) {
      if (v->is_string()) {
        if (v->get<std::string>() != "auto")
          throw ConfigError("cce.learning_rate must be \"auto\" or a number");
        cfg.cce.learning_rate.reset();
      } else {
        const double rate = detail::get_number(*v, "cce.learning_rate");
        if (!(rate > 0.0)) throw ConfigError("cce.learning_rate must be > 0");
        cfg.cce.learning_rate = rate;
      }
    }
    if (const json* v = detail::find(*cce_j, "target_eps")) {
      cfg.cce.target_eps = detail::get_number(*v, "cce.target_eps");
      if (cfg.cce.target_eps < 0.0)
        throw ConfigError("cce.target_eps must be >= 0");
    }
  }

  // seeds
  const json* seed_j = detail::find(root, "seed");
  const json* seeds_j = detail::find(root, "seeds");
  if (seed_j && seeds_j)
    throw ConfigError("use either seed or seeds, not both");
  if (seed_j) {
    cfg.seeds = {detail::get_u64(*seed_j, "seed")};
  } else if (seeds_j) {
    if (!seeds_j->is_array() || seeds_j->empty())
      throw ConfigError("seeds must be a non-empty array");
    cfg.seeds.clear();
    for (const auto& e : *seeds_j)
      cfg.seeds.push_back(detail::get_u64(e, "seeds"));
  } else {
    throw ConfigError("missing required key: seed");
  }

  // output
  if (const json* out_j = detail::find(root, "output")) {
    if (!out_j->is_object()) throw ConfigError("output must be an object");
    detail::check_keys(*out_j, "output", {"directory", "timing"});
    if (const json* v = detail::find(*out_j, "directory"))
      cfg.out_dir = detail::get_string(*v, "output.directory");
    if (const json* v = detail::find(*out_j, "timing"))
      cfg.timing = detail::get_bool(*v, "output.timing");
  }

  if (const json* v = detail::find(root, "true_value_episodes")) {
    cfg.true_value_episodes = detail::get_int(*v, "true_value_episodes");
    if (cfg.true_value_episodes < 1)
      throw ConfigError("true_value_episodes must be >= 1");
  }
  if (const json* v = detail::find(root, "threads")) {
    cfg.threads = detail::get_int(*v, "threads");
    if (cfg.threads < 0) throw ConfigError("threads must be >= 0");
  }
  if (const json* v = detail::find(root, "parallel_seeds"))
    cfg.parallel_seeds = detail::get_bool(*v, "parallel_seeds");

  return cfg;
}

}  // namespace hmarl

#endif  // HMARL_CONFIG_HPP_
