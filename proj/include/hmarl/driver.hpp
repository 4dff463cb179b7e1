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

#ifndef HMARL_DRIVER_HPP_
#define HMARL_DRIVER_HPP_

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "hmarl/cce.hpp"
#include "hmarl/env.hpp"
#include "hmarl/gp.hpp"
#include "hmarl/hallucination.hpp"
#include "hmarl/parallel.hpp"
#include "hmarl/random.hpp"

namespace hmarl {

enum class PlannerKind { kHMarl, kPredMean, kOracle };

inline std::string to_string(PlannerKind kind) {
  switch (kind) {
    case PlannerKind::kHMarl: return "hmarl";
    case PlannerKind::kPredMean: return "predmean";
    case PlannerKind::kOracle: return "oracle";
  }
  throw std::logic_error("unknown planner kind");
}

struct GPConfig {
  std::vector<KernelSpec> kernels;  // one per state coordinate
  double noise_variance = 1e-4;
};

struct ExperimentConfig {
  MarkovGameSpec env;
  PolicySet policy_set;
  PlannerKind planner = PlannerKind::kHMarl;
  int rounds = 50;
  HallucinationConfig hallucination;
  GPConfig gp;
  HedgeConfig cce;
  std::vector<std::uint64_t> seeds = {0};
  std::string out_dir = "out";
  bool timing = false;
  int true_value_episodes = 200;
  int threads = 1;  // within-round tensor parallelism; 0 picks the core count
  bool parallel_seeds = false;

  int input_dim() const {
    int d = env.state_dim;
    for (int q : env.action_dims) d += q;
    return d;
  }

  void validate() const {
    if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
    env.validate();
    if (policy_set.n_agents() != env.n_agents)
      throw std::invalid_argument("policy set arity mismatch");
    for (int i = 0; i < env.n_agents; ++i)
      if (policy_set.menu_size(i) < 1)
        throw std::invalid_argument("policy set: empty menu");
    hallucination.validate(env.state_dim);
    if (static_cast<int>(gp.kernels.size()) != env.state_dim)
      throw std::invalid_argument("gp: one kernel per state coordinate");
    for (const KernelSpec& k : gp.kernels) k.validate(input_dim());
    if (!(gp.noise_variance > 0.0))
      throw std::invalid_argument("gp: noise variance must be > 0");
    if (cce.iterations < 1)
      throw std::invalid_argument("hedge: iterations must be >= 1");
    if (true_value_episodes < 1)
      throw std::invalid_argument("true_value_episodes must be >= 1");
    if (seeds.empty()) throw std::invalid_argument("seeds must be non-empty");
  }
};

struct RoundLog {
  int t;  // 1-indexed
  MixedProfile mixed;
  ProfileIndex sampled;
  RolloutTrace trace;
  PayoffTensor ucb_tensor;
  PayoffTensor lcb_tensor;
  double eps_t;
  double gap_t;
  double sigma_sq_increment;
  Eigen::VectorXd true_value_under_P;
  double seconds;
};

/// One interaction round: plan on the optimistic game, solve for the round's
/// distribution, play a sampled profile on the true environment, then absorb
/// the observed transitions into the model. `model` is replaced by the
/// post-update posterior.
inline RoundLog run_round(const ExperimentConfig& cfg,
                          const PayoffTensor& true_values, GPPosterior* model,
                          int t, std::uint64_t master_seed) {
  const auto started = std::chrono::steady_clock::now();
  const MarkovGameSpec& env = cfg.env;
  const PolicySet& ps = cfg.policy_set;
  const int n = env.n_agents;
  const std::vector<int> shape = ps.shape();
  PayoffTensor ucb(shape);
  PayoffTensor lcb(shape);
  const int profiles = ucb.n_profiles();

  if (cfg.planner == PlannerKind::kOracle) {
    for (int i = 0; i < n; ++i)
      for (int f = 0; f < profiles; ++f) {
        ucb.set_value(i, f, true_values.value(i, f));
        lcb.set_value(i, f, true_values.value(i, f));
      }
  } else {
    std::vector<double> ucb_vals(static_cast<std::size_t>(profiles) * n);
    std::vector<double> lcb_vals(static_cast<std::size_t>(profiles) * n);
    parallel_for(profiles, cfg.threads, [&](int f) {
      const ProfileIndex profile = ucb.profile_at(f);
      for (int i = 0; i < n; ++i) {
        const StreamFamily family(derive_key(
            master_seed,
            {stream_tag::kRound, static_cast<std::uint64_t>(t),
             stream_tag::kProfile, static_cast<std::uint64_t>(f),
             static_cast<std::uint64_t>(i)}));
        const std::size_t slot = static_cast<std::size_t>(f) * n + i;
        if (cfg.planner == PlannerKind::kPredMean) {
          const double v = mean_estimate(env, *model, ps, profile, i,
                                         cfg.hallucination, family)
                               .mean;
          ucb_vals[slot] = v;
          lcb_vals[slot] = v;
        } else {
          ucb_vals[slot] = ucb_estimate(env, *model, ps, profile, i,
                                        cfg.hallucination, family)
                               .mean;
          lcb_vals[slot] = lcb_estimate(env, *model, ps, profile, i,
                                        cfg.hallucination, family)
                               .mean;
        }
      }
    });
    for (int f = 0; f < profiles; ++f)
      for (int i = 0; i < n; ++i) {
        ucb.set_value(i, f, ucb_vals[static_cast<std::size_t>(f) * n + i]);
        lcb.set_value(i, f, lcb_vals[static_cast<std::size_t>(f) * n + i]);
      }
  }

  MixedProfile mixed = hedge_selfplay(ucb, cfg.cce);
  const double eps_t = exploitability(ucb, mixed).max;
  double gap_t = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g =
        expected_value(ucb, mixed, i) - expected_value(lcb, mixed, i);
    if (i == 0 || g > gap_t) gap_t = g;
  }

  RandomStream sample_stream(derive_key(
      master_seed, {stream_tag::kRound, static_cast<std::uint64_t>(t),
                    stream_tag::kSampleProfile}));
  const int flat = mixed.sample(sample_stream);
  const ProfileIndex sampled = ucb.profile_at(flat);

  RandomStream rollout_stream(derive_key(
      master_seed, {stream_tag::kRound, static_cast<std::uint64_t>(t),
                    stream_tag::kEnvRollout}));
  RolloutTrace trace = rollout_true(env, ps, sampled, rollout_stream);

  // Model uncertainty released by this round's data, under the pre-update
  // posterior.
  const int d = cfg.input_dim();
  Eigen::MatrixXd inputs(env.horizon, d);
  Eigen::MatrixXd targets(env.horizon, env.state_dim);
  double sigma_sq = 0.0;
  Eigen::VectorXd delta_mean, delta_std;
  for (int h = 0; h < env.horizon; ++h) {
    const Eigen::VectorXd x = flatten_input(trace.states[h], trace.actions[h]);
    model->predict_delta(x, &delta_mean, &delta_std);
    sigma_sq += delta_std.squaredNorm();
    inputs.row(h) = x.transpose();
    targets.row(h) = (trace.states[h + 1] - trace.states[h]).transpose();
  }

  Eigen::VectorXd true_value(n);
  for (int i = 0; i < n; ++i)
    true_value(i) = expected_value(true_values, mixed, i);

  *model = gp_update(*model, inputs, targets);

  double seconds = 0.0;
  if (cfg.timing) {
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            started)
                  .count();
  }
  return RoundLog{t,
                  std::move(mixed),
                  sampled,
                  std::move(trace),
                  std::move(ucb),
                  std::move(lcb),
                  eps_t,
                  gap_t,
                  sigma_sq,
                  std::move(true_value),
                  seconds};
}

struct RegretCurves {
  Eigen::MatrixXd terms;       // rounds x agents, per-round regret terms
  Eigen::MatrixXd cumulative;  // running sums of the terms
};

/// Per-round regret term for agent i: best fixed policy against P_t's
/// marginal minus the realized expected value, both on the true tensor.
inline RegretCurves dynamic_regret(const std::vector<RoundLog>& logs,
                                   const PayoffTensor& true_values) {
  const int rounds = static_cast<int>(logs.size());
  const int n = true_values.n_agents();
  RegretCurves out;
  out.terms.resize(rounds, n);
  out.cumulative.resize(rounds, n);
  for (int r = 0; r < rounds; ++r) {
    for (int i = 0; i < n; ++i) {
      out.terms(r, i) =
          best_response_value(true_values, logs[r].mixed, i).value -
          expected_value(true_values, logs[r].mixed, i);
      out.cumulative(r, i) =
          (r == 0 ? 0.0 : out.cumulative(r - 1, i)) + out.terms(r, i);
    }
  }
  return out;
}

inline std::vector<double> information_curve(
    const std::vector<double>& increments) {
  std::vector<double> out(increments.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < increments.size(); ++i) {
    acc += increments[i];
    out[i] = acc;
  }
  return out;
}

inline std::vector<double> information_curve(const std::vector<RoundLog>& logs) {
  std::vector<double> inc(logs.size());
  for (std::size_t i = 0; i < logs.size(); ++i)
    inc[i] = logs[i].sigma_sq_increment;
  return information_curve(inc);
}

/// 1-indexed argmin of the per-round gaps; ties go to the earliest round.
inline int select_tstar(const std::vector<double>& gaps) {
  if (gaps.empty()) throw std::invalid_argument("select_tstar: empty logs");
  int best = 0;
  for (int i = 1; i < static_cast<int>(gaps.size()); ++i)
    if (gaps[i] < gaps[best]) best = i;
  return best + 1;
}

inline int select_tstar(const std::vector<RoundLog>& logs) {
  std::vector<double> gaps(logs.size());
  for (std::size_t i = 0; i < logs.size(); ++i) gaps[i] = logs[i].gap_t;
  return select_tstar(gaps);
}

inline double epsilon_sum(const std::vector<RoundLog>& logs) {
  double acc = 0.0;
  for (const RoundLog& log : logs) acc += log.eps_t;
  return acc;
}

struct ExperimentResult {
  PlannerKind planner;
  std::uint64_t master_seed;
  std::vector<RoundLog> logs;
  RegretCurves regret;
  std::vector<double> information;
  int t_star;
  double eps_sum;
  TruePayoff true_payoff;
};

/// Full run for one master seed: true tensor up front, then `rounds`
/// sequential interaction rounds starting from the empty model. The result
/// is a pure function of (cfg, master_seed).
inline ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                       std::uint64_t master_seed) {
  cfg.validate();
  const MarkovGameSpec& env = cfg.env;
  const bool deterministic = (env.noise_std.array() == 0.0).all();
  TruePayoff true_payoff = true_payoff_tensor(
      env, cfg.policy_set, cfg.true_value_episodes, master_seed, deterministic);

  GPPosterior model =
      gp_fit(TransitionDataset(cfg.input_dim(), env.state_dim), cfg.gp.kernels,
             cfg.gp.noise_variance);

  std::vector<RoundLog> logs;
  logs.reserve(cfg.rounds);
  for (int t = 1; t <= cfg.rounds; ++t)
    logs.push_back(run_round(cfg, true_payoff.values, &model, t, master_seed));

  RegretCurves regret = dynamic_regret(logs, true_payoff.values);
  std::vector<double> information = information_curve(logs);
  const int t_star = select_tstar(logs);
  const double eps_sum = epsilon_sum(logs);
  return ExperimentResult{cfg.planner,        master_seed,
                          std::move(logs),    std::move(regret),
                          std::move(information), t_star,
                          eps_sum,            std::move(true_payoff)};
}

}  // namespace hmarl

#endif  // HMARL_DRIVER_HPP_
