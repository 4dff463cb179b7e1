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

#ifndef HMARL_ENV_HPP_
#define HMARL_ENV_HPP_

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hmarl/cce.hpp"
#include "hmarl/random.hpp"

namespace hmarl {

using StateVector = Eigen::VectorXd;
using ActionVector = Eigen::VectorXd;
using JointAction = std::vector<ActionVector>;

enum class TransitionKind {
  /// Agent coordinates integrate their own action; the trailing shared
  /// coordinate drifts toward the agents' mean position through a tanh
  /// coupling. State space is unbounded.
  kNonlinearNav2,
  /// Same dynamics with every coordinate clamped to [-1, 1] inside the
  /// transition mean, so the reachable set is a compact grid cell.
  kGrid2,
};

struct RewardParams {
  /// Per-agent goal positions for the agent's own coordinate.
  Eigen::VectorXd goals;
  double lambda1 = 0.5;  // weight of the agent/shared-coordinate proximity penalty
  double lambda2 = 0.5;  // weight of the pairwise agent collision penalty
  double rho = 0.05;     // squared length scale of both penalty kernels
};

/// An N-agent Markov game on R^p with p = N + 1: coordinates 0..N-1 belong
/// to the agents (one each), coordinate N is shared and uncontrolled.
struct MarkovGameSpec {
  TransitionKind kind = TransitionKind::kNonlinearNav2;
  int n_agents = 2;
  int horizon = 10;
  int state_dim = 3;
  std::vector<int> action_dims;  // one entry per agent, all 1 in this family
  StateVector initial_state;
  Eigen::VectorXd noise_std;  // per-coordinate transition noise std
  double step_size = 0.1;     // action integration gain
  double coupling = 0.2;      // shared-coordinate drift magnitude
  double attraction = 2.0;    // tanh sharpness of the shared-coordinate drift
  RewardParams rewards;
  double reward_bound = 6.0;  // |r^i| is bounded by this on the reachable set

  void validate() const {
    if (n_agents < 1) throw std::invalid_argument("game spec: n_agents must be >= 1");
    if (horizon < 1) throw std::invalid_argument("game spec: horizon must be >= 1");
    if (state_dim != n_agents + 1)
      throw std::invalid_argument("game spec: state_dim must be n_agents + 1");
    if (static_cast<int>(action_dims.size()) != n_agents)
      throw std::invalid_argument("game spec: action_dims arity mismatch");
    for (int q : action_dims)
      if (q != 1) throw std::invalid_argument("game spec: action dims must be 1");
    if (initial_state.size() != state_dim)
      throw std::invalid_argument("game spec: initial state dim mismatch");
    if (noise_std.size() != state_dim)
      throw std::invalid_argument("game spec: noise std dim mismatch");
    if ((noise_std.array() < 0.0).any())
      throw std::invalid_argument("game spec: noise std must be >= 0");
    if (rewards.goals.size() != n_agents)
      throw std::invalid_argument("game spec: goals arity mismatch");
    if (rewards.rho <= 0.0) throw std::invalid_argument("game spec: rho must be > 0");
  }
};

/// Proportional goal-seeking controller: a = clip(gain * (goal - x_own)).
struct PolicyDescriptor {
  double gain = 1.0;
  double goal = 0.0;
  double action_limit = 1.0;
};

/// Finite per-agent policy menus; the joint profile space is their product.
struct PolicySet {
  std::vector<std::vector<PolicyDescriptor>> menus;  // menus[i][j]

  int n_agents() const { return static_cast<int>(menus.size()); }
  int menu_size(int agent) const { return static_cast<int>(menus[agent].size()); }
  std::vector<int> shape() const {
    std::vector<int> s(menus.size());
    for (std::size_t i = 0; i < menus.size(); ++i)
      s[i] = static_cast<int>(menus[i].size());
    return s;
  }
  int n_profiles() const {
    int n = 1;
    for (const auto& m : menus) n *= static_cast<int>(m.size());
    return n;
  }
};

/// One policy index per agent.
using ProfileIndex = std::vector<int>;

struct RolloutTrace {
  std::vector<StateVector> states;            // horizon + 1 entries
  std::vector<JointAction> actions;           // horizon entries
  std::vector<Eigen::VectorXd> rewards;       // horizon entries, each n_agents

  Eigen::VectorXd cumulative_rewards(int n_agents) const {
    Eigen::VectorXd total = Eigen::VectorXd::Zero(n_agents);
    for (const auto& r : rewards) total += r;
    return total;
  }
};

namespace detail {

inline void check_state(const MarkovGameSpec& spec, const StateVector& s) {
  if (s.size() != spec.state_dim || !s.allFinite())
    throw std::runtime_error("non-finite state/action");
}

inline void check_joint_action(const MarkovGameSpec& spec, const JointAction& a) {
  if (static_cast<int>(a.size()) != spec.n_agents)
    throw std::runtime_error("non-finite state/action");
  for (int i = 0; i < spec.n_agents; ++i)
    if (a[i].size() != spec.action_dims[i] || !a[i].allFinite())
      throw std::runtime_error("non-finite state/action");
}

}  // namespace detail

/// Noise-free transition mean f(s, a).
inline StateVector transition_mean(const MarkovGameSpec& spec,
                                   const StateVector& s, const JointAction& a) {
  detail::check_state(spec, s);
  detail::check_joint_action(spec, a);
  const int n = spec.n_agents;
  StateVector next(spec.state_dim);
  for (int i = 0; i < n; ++i) next(i) = s(i) + spec.step_size * a[i](0);
  const double mean_pos = s.head(n).mean();
  next(n) = s(n) + spec.coupling * std::tanh(spec.attraction * (mean_pos - s(n)));
  if (spec.kind == TransitionKind::kGrid2)
    next = next.cwiseMax(-1.0).cwiseMin(1.0);
  return next;
}

/// r^i(s, a) = -(x^i - g^i)^2 - lambda1 * exp(-(x^i - z)^2 / rho)
///             - lambda2 * sum_{j != i} exp(-(x^i - x^j)^2 / rho).
/// Rewards depend on the state only; the action argument is validated and
/// kept for interface uniformity.
inline Eigen::VectorXd reward_vector(const MarkovGameSpec& spec,
                                     const StateVector& s, const JointAction& a) {
  detail::check_state(spec, s);
  detail::check_joint_action(spec, a);
  const int n = spec.n_agents;
  const double z = s(n);
  const RewardParams& rp = spec.rewards;
  Eigen::VectorXd r(n);
  for (int i = 0; i < n; ++i) {
    const double x = s(i);
    double value = -(x - rp.goals(i)) * (x - rp.goals(i));
    value -= rp.lambda1 * std::exp(-(x - z) * (x - z) / rp.rho);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = x - s(j);
      value -= rp.lambda2 * std::exp(-d * d / rp.rho);
    }
    r(i) = value;
  }
  return r;
}

struct StepResult {
  StateVector next_state;
  Eigen::VectorXd rewards;
};

/// s' = f(s, a) + w with rewards evaluated at (s, a).
inline StepResult env_step(const MarkovGameSpec& spec, const StateVector& s,
                           const JointAction& a, const Eigen::VectorXd& noise) {
  if (noise.size() != spec.state_dim || !noise.allFinite())
    throw std::runtime_error("non-finite state/action");
  StepResult out;
  out.next_state = transition_mean(spec, s, a) + noise;
  out.rewards = reward_vector(spec, s, a);
  return out;
}

inline ActionVector policy_act(const PolicySet& policies, int agent, int policy,
                               const StateVector& s) {
  if (agent < 0 || agent >= policies.n_agents())
    throw std::out_of_range("policy index out of range");
  if (policy < 0 || policy >= policies.menu_size(agent))
    throw std::out_of_range("policy index out of range");
  const PolicyDescriptor& pd = policies.menus[agent][policy];
  const double raw = pd.gain * (pd.goal - s(agent));
  ActionVector a(1);
  a(0) = std::min(pd.action_limit, std::max(-pd.action_limit, raw));
  return a;
}

inline JointAction joint_action(const PolicySet& policies,
                                const ProfileIndex& profile,
                                const StateVector& s) {
  if (static_cast<int>(profile.size()) != policies.n_agents())
    throw std::invalid_argument("profile arity mismatch");
  JointAction a(profile.size());
  for (std::size_t i = 0; i < profile.size(); ++i)
    a[i] = policy_act(policies, static_cast<int>(i), profile[i], s);
  return a;
}

/// Draw a horizon-by-state_dim matrix of transition noise, row h for step h.
/// Rows are filled in row-major order so the draw sequence is reproducible.
inline Eigen::MatrixXd draw_noise(const MarkovGameSpec& spec, RandomStream& stream) {
  Eigen::MatrixXd w = stream.gaussian_matrix(spec.horizon, spec.state_dim);
  for (int h = 0; h < spec.horizon; ++h)
    w.row(h) = w.row(h).cwiseProduct(spec.noise_std.transpose());
  return w;
}

/// Roll the true dynamics for one profile under a pre-drawn noise matrix.
/// Sharing the same matrix across profiles gives common random numbers.
inline RolloutTrace rollout_true(const MarkovGameSpec& spec,
                                 const PolicySet& policies,
                                 const ProfileIndex& profile,
                                 const Eigen::MatrixXd& noise) {
  if (noise.rows() != spec.horizon || noise.cols() != spec.state_dim)
    throw std::invalid_argument("noise matrix shape mismatch");
  RolloutTrace trace;
  trace.states.reserve(spec.horizon + 1);
  trace.actions.reserve(spec.horizon);
  trace.rewards.reserve(spec.horizon);
  StateVector s = spec.initial_state;
  trace.states.push_back(s);
  for (int h = 0; h < spec.horizon; ++h) {
    const JointAction a = joint_action(policies, profile, s);
    StepResult step = env_step(spec, s, a, noise.row(h).transpose());
    trace.actions.push_back(a);
    trace.rewards.push_back(step.rewards);
    s = std::move(step.next_state);
    trace.states.push_back(s);
  }
  return trace;
}

inline RolloutTrace rollout_true(const MarkovGameSpec& spec,
                                 const PolicySet& policies,
                                 const ProfileIndex& profile,
                                 RandomStream& stream) {
  Eigen::MatrixXd noise = draw_noise(spec, stream);
  return rollout_true(spec, policies, profile, noise);
}

struct TruePayoff {
  PayoffTensor values;
  PayoffTensor std_error;
  int episodes = 0;
  bool deterministic = false;
};

/// Monte-Carlo estimate of the true game tensor U^i(pi) = E[sum_h r^i_h].
/// Episode m draws one noise matrix from derive_key(master, {kTrueTensor, m})
/// and reuses it for every profile (common random numbers), so profile
/// comparisons are paired. With `deterministic` set, a single noise-free
/// episode is used and the standard errors are zero.
inline TruePayoff true_payoff_tensor(const MarkovGameSpec& spec,
                                     const PolicySet& policies, int episodes,
                                     std::uint64_t master_seed,
                                     bool deterministic = false) {
  spec.validate();
  if (!deterministic && episodes < 1)
    throw std::invalid_argument("true payoff tensor: episodes must be >= 1");
  const std::vector<int> shape = policies.shape();
  TruePayoff out{PayoffTensor(shape), PayoffTensor(shape),
                 deterministic ? 1 : episodes, deterministic};
  const int n = spec.n_agents;
  const int profiles = out.values.n_profiles();

  if (deterministic) {
    const Eigen::MatrixXd zero =
        Eigen::MatrixXd::Zero(spec.horizon, spec.state_dim);
    for (int f = 0; f < profiles; ++f) {
      const ProfileIndex profile = out.values.profile_at(f);
      const Eigen::VectorXd total =
          rollout_true(spec, policies, profile, zero).cumulative_rewards(n);
      for (int i = 0; i < n; ++i) out.values.set_value(i, f, total(i));
    }
    return out;
  }

  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(profiles, n);
  Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(profiles, n);
  for (int m = 0; m < episodes; ++m) {
    RandomStream stream(derive_key(master_seed, {stream_tag::kTrueTensor,
                                                 static_cast<std::uint64_t>(m)}));
    const Eigen::MatrixXd noise = draw_noise(spec, stream);
    for (int f = 0; f < profiles; ++f) {
      const ProfileIndex profile = out.values.profile_at(f);
      const Eigen::VectorXd total =
          rollout_true(spec, policies, profile, noise).cumulative_rewards(n);
      sum.row(f) += total.transpose();
      sum_sq.row(f) += total.array().square().matrix().transpose();
    }
  }
  for (int f = 0; f < profiles; ++f) {
    for (int i = 0; i < n; ++i) {
      const double mean = sum(f, i) / episodes;
      out.values.set_value(i, f, mean);
      double se = 0.0;
      if (episodes > 1) {
        const double var =
            (sum_sq(f, i) - episodes * mean * mean) / (episodes - 1);
        se = std::sqrt(std::max(0.0, var) / episodes);
      }
      out.std_error.set_value(i, f, se);
    }
  }
  return out;
}

/// Goal/gain policy menus: every agent gets one descriptor per gain, all
/// steering toward that agent's own reward goal.
inline PolicySet make_goal_gain_policies(const MarkovGameSpec& spec,
                                         const std::vector<double>& gains,
                                         double action_limit = 1.0) {
  PolicySet ps;
  ps.menus.resize(spec.n_agents);
  for (int i = 0; i < spec.n_agents; ++i) {
    for (double gain : gains)
      ps.menus[i].push_back({gain, spec.rewards.goals(i), action_limit});
  }
  return ps;
}

/// Two-agent navigation game with a tanh-coupled shared coordinate.
inline MarkovGameSpec make_nonlinear_nav2() {
  MarkovGameSpec spec;
  spec.kind = TransitionKind::kNonlinearNav2;
  spec.n_agents = 2;
  spec.horizon = 10;
  spec.state_dim = 3;
  spec.action_dims = {1, 1};
  spec.initial_state = Eigen::Vector3d(-0.5, 0.5, 0.0);
  spec.noise_std = Eigen::Vector3d::Constant(0.01);
  spec.step_size = 0.1;
  spec.coupling = 0.2;
  spec.attraction = 2.0;
  spec.rewards.goals = Eigen::Vector2d(0.5, -0.5);
  spec.rewards.lambda1 = 0.5;
  spec.rewards.lambda2 = 0.5;
  spec.rewards.rho = 0.05;
  spec.reward_bound = 6.0;
  spec.validate();
  return spec;
}

/// Clamped, noise-free variant whose small reachable set makes exhaustive
/// enumeration practical.
inline MarkovGameSpec make_grid2() {
  MarkovGameSpec spec = make_nonlinear_nav2();
  spec.kind = TransitionKind::kGrid2;
  spec.noise_std = Eigen::Vector3d::Zero();
  spec.validate();
  return spec;
}

inline std::string to_string(TransitionKind kind) {
  switch (kind) {
    case TransitionKind::kNonlinearNav2: return "nonlinear-nav-2";
    case TransitionKind::kGrid2: return "grid-2";
  }
  throw std::logic_error("unknown transition kind");
}

}  // namespace hmarl

#endif  // HMARL_ENV_HPP_
