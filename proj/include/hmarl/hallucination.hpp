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

#ifndef HMARL_HALLUCINATION_HPP_
#define HMARL_HALLUCINATION_HPP_

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "hmarl/env.hpp"
#include "hmarl/gp.hpp"
#include "hmarl/random.hpp"

namespace hmarl {

enum class EtaMode { kUniformSpaced, kUniformRandom };

/// Candidate perturbation directions in [-1,1]^p. Masked-off coordinates are
/// always zero, so those coordinates follow the posterior mean.
struct EtaGrid {
  std::vector<Eigen::VectorXd> vectors;
  EtaMode mode = EtaMode::kUniformSpaced;
  std::vector<bool> mask;

  void validate() const {
    if (vectors.empty()) throw std::invalid_argument("eta grid: Z must be >= 1");
    for (const Eigen::VectorXd& eta : vectors) {
      if (eta.size() != static_cast<Eigen::Index>(mask.size()))
        throw std::invalid_argument("eta grid: vector dim mismatch");
      if (!eta.allFinite() || (eta.array().abs() > 1.0).any())
        throw std::invalid_argument("eta grid: coordinates must lie in [-1,1]");
      for (Eigen::Index c = 0; c < eta.size(); ++c)
        if (!mask[c] && eta(c) != 0.0)
          throw std::invalid_argument("eta grid: masked-off coordinate must be 0");
    }
  }
};

/// Z scalars evenly spaced over [-1,1], broadcast to the unmasked
/// coordinates: eta^j = c_j * mask with c_j = -1 + 2j/(Z-1). Odd Z includes
/// the all-zero vector; Z = 1 is the zero grid.
inline EtaGrid make_eta_grid_spaced(int z, std::vector<bool> mask) {
  if (z < 1) throw std::invalid_argument("eta grid: Z must be >= 1");
  EtaGrid grid;
  grid.mode = EtaMode::kUniformSpaced;
  grid.mask = std::move(mask);
  const int p = static_cast<int>(grid.mask.size());
  for (int j = 0; j < z; ++j) {
    const double c = z == 1 ? 0.0 : -1.0 + 2.0 * j / (z - 1);
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(p);
    for (int i = 0; i < p; ++i)
      if (grid.mask[i]) eta(i) = c;
    grid.vectors.push_back(std::move(eta));
  }
  grid.validate();
  return grid;
}

/// Z vectors drawn uniformly from [-1,1]^p, then zeroed on masked-off
/// coordinates. Draw order is vector-major, coordinate-minor; every
/// coordinate consumes one draw whether masked or not, so the sequence is
/// independent of the mask.
inline EtaGrid make_eta_grid_random(int z, std::vector<bool> mask,
                                    RandomStream& stream) {
  if (z < 1) throw std::invalid_argument("eta grid: Z must be >= 1");
  EtaGrid grid;
  grid.mode = EtaMode::kUniformRandom;
  grid.mask = std::move(mask);
  const int p = static_cast<int>(grid.mask.size());
  for (int j = 0; j < z; ++j) {
    Eigen::VectorXd eta(p);
    for (int i = 0; i < p; ++i) eta(i) = stream.uniform(-1.0, 1.0);
    for (int i = 0; i < p; ++i)
      if (!grid.mask[i]) eta(i) = 0.0;
    grid.vectors.push_back(std::move(eta));
  }
  grid.validate();
  return grid;
}

enum class RolloutObjective { kMax, kMin, kMean };

enum class RolloutMode { kGreedyStep, kTrajectoryBeam };

struct HallucinationConfig {
  int z = 5;
  EtaMode eta_mode = EtaMode::kUniformSpaced;
  std::vector<bool> coordinate_mask;  // empty: filled from the env by the driver
  int episodes = 2;
  BetaSchedule beta_schedule;
  Eigen::VectorXd noise_std;  // rollout noise; defaults to the env's
  RolloutMode rollout_mode = RolloutMode::kGreedyStep;

  void validate(int state_dim) const {
    if (z < 1) throw std::invalid_argument("hallucination: Z must be >= 1");
    if (episodes < 1)
      throw std::invalid_argument("hallucination: episodes must be >= 1");
    if (static_cast<int>(coordinate_mask.size()) != state_dim)
      throw std::invalid_argument("hallucination: mask dim mismatch");
    if (noise_std.size() != state_dim)
      throw std::invalid_argument("hallucination: noise std dim mismatch");
    if ((noise_std.array() < 0.0).any())
      throw std::invalid_argument("hallucination: noise std must be >= 0");
    beta_schedule.validate();
  }
};

struct ValueEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int episodes = 0;
};

/// s' = mean_next(s,a) + beta * (std(s,a) ∘ eta) + w.
inline StateVector hallucinated_step(const GPPosterior& post, double beta,
                                     const StateVector& s, const JointAction& a,
                                     const Eigen::VectorXd& eta,
                                     const Eigen::VectorXd& w) {
  if (beta < 0.0) throw std::invalid_argument("hallucination: beta must be >= 0");
  if (!eta.allFinite() || (eta.array().abs() > 1.0).any())
    throw std::invalid_argument("hallucination: eta outside [-1,1]");
  const Prediction pred = gp_predict(post, s, a);
  if (eta.size() != pred.std.size() || w.size() != pred.std.size())
    throw std::invalid_argument("hallucination: dim mismatch");
  return pred.mean_next + beta * pred.std.cwiseProduct(eta) + w;
}

namespace detail {

inline double candidate_reward(const MarkovGameSpec& spec, const PolicySet& ps,
                               const ProfileIndex& profile, int agent,
                               const StateVector& candidate) {
  if (!candidate.allFinite()) throw std::runtime_error("hallucination diverged");
  const JointAction a = joint_action(ps, profile, candidate);
  return reward_vector(spec, candidate, a)(agent);
}

inline int select_index(const std::vector<double>& scores, RolloutObjective obj) {
  int best = 0;
  for (int j = 1; j < static_cast<int>(scores.size()); ++j) {
    if (obj == RolloutObjective::kMax ? scores[j] > scores[best]
                                      : scores[j] < scores[best])
      best = j;
  }
  return best;
}

}  // namespace detail

/// One model-based rollout with per-step candidate selection. At each step
/// every eta vector produces one candidate from the same parent state and the
/// same noise row; the candidate with the best instantaneous reward
/// r^i(candidate, pi(candidate)) is kept (Max maximizes, Min minimizes, Mean
/// uses the single eta = 0 candidate). Ties go to the lowest candidate index.
/// Trace rewards are the environment's true reward function on the
/// hallucinated states.
inline RolloutTrace greedy_rollout(const MarkovGameSpec& spec,
                                   const GPPosterior& post, double beta,
                                   const PolicySet& ps, const ProfileIndex& profile,
                                   int agent, const EtaGrid& grid,
                                   const Eigen::MatrixXd& noise,
                                   RolloutObjective objective) {
  grid.validate();
  if (agent < 0 || agent >= spec.n_agents)
    throw std::out_of_range("policy index out of range");
  if (noise.rows() != spec.horizon || noise.cols() != spec.state_dim)
    throw std::invalid_argument("noise matrix shape mismatch");
  const Eigen::VectorXd zero_eta = Eigen::VectorXd::Zero(spec.state_dim);
  const bool mean_mode = objective == RolloutObjective::kMean;
  const int n_candidates = mean_mode ? 1 : static_cast<int>(grid.vectors.size());

  RolloutTrace trace;
  trace.states.reserve(spec.horizon + 1);
  StateVector s = spec.initial_state;
  trace.states.push_back(s);
  std::vector<double> scores(n_candidates);
  std::vector<StateVector> candidates(n_candidates);
  for (int h = 0; h < spec.horizon; ++h) {
    const JointAction a = joint_action(ps, profile, s);
    trace.actions.push_back(a);
    trace.rewards.push_back(reward_vector(spec, s, a));
    const Eigen::VectorXd w = noise.row(h).transpose();
    for (int j = 0; j < n_candidates; ++j) {
      const Eigen::VectorXd& eta = mean_mode ? zero_eta : grid.vectors[j];
      candidates[j] = hallucinated_step(post, beta, s, a, eta, w);
      scores[j] = detail::candidate_reward(spec, ps, profile, agent, candidates[j]);
    }
    s = candidates[detail::select_index(scores, objective)];
    trace.states.push_back(s);
  }
  return trace;
}

/// Beam alternative: one full-horizon trajectory per eta vector, each applying
/// its eta at every step under the shared noise matrix; the trajectory with
/// the best cumulative reward wins (ties to the lowest index).
inline RolloutTrace beam_rollout(const MarkovGameSpec& spec,
                                 const GPPosterior& post, double beta,
                                 const PolicySet& ps, const ProfileIndex& profile,
                                 int agent, const EtaGrid& grid,
                                 const Eigen::MatrixXd& noise,
                                 RolloutObjective objective) {
  grid.validate();
  if (agent < 0 || agent >= spec.n_agents)
    throw std::out_of_range("policy index out of range");
  if (noise.rows() != spec.horizon || noise.cols() != spec.state_dim)
    throw std::invalid_argument("noise matrix shape mismatch");
  const Eigen::VectorXd zero_eta = Eigen::VectorXd::Zero(spec.state_dim);
  const bool mean_mode = objective == RolloutObjective::kMean;
  const int width = mean_mode ? 1 : static_cast<int>(grid.vectors.size());

  std::vector<RolloutTrace> beams(width);
  std::vector<double> totals(width, 0.0);
  for (int j = 0; j < width; ++j) {
    const Eigen::VectorXd& eta = mean_mode ? zero_eta : grid.vectors[j];
    RolloutTrace& trace = beams[j];
    StateVector s = spec.initial_state;
    trace.states.push_back(s);
    for (int h = 0; h < spec.horizon; ++h) {
      const JointAction a = joint_action(ps, profile, s);
      trace.actions.push_back(a);
      trace.rewards.push_back(reward_vector(spec, s, a));
      s = hallucinated_step(post, beta, s, a, eta, noise.row(h).transpose());
      if (!s.allFinite()) throw std::runtime_error("hallucination diverged");
      trace.states.push_back(s);
    }
    totals[j] = trace.cumulative_rewards(spec.n_agents)(agent);
  }
  return beams[detail::select_index(totals, objective)];
}

namespace detail {

inline ValueEstimate rollout_estimate(const MarkovGameSpec& spec,
                                      const GPPosterior& post, const PolicySet& ps,
                                      const ProfileIndex& profile, int agent,
                                      const HallucinationConfig& cfg,
                                      const StreamFamily& family,
                                      RolloutObjective objective,
                                      std::optional<double> beta_override) {
  cfg.validate(spec.state_dim);
  const double beta = beta_override
                          ? *beta_override
                          : beta_value(cfg.beta_schedule, post.n_points());
  EtaGrid grid;
  if (cfg.eta_mode == EtaMode::kUniformSpaced) {
    grid = make_eta_grid_spaced(cfg.z, cfg.coordinate_mask);
  } else {
    RandomStream grid_stream = family.stream({stream_tag::kEtaGrid});
    grid = make_eta_grid_random(cfg.z, cfg.coordinate_mask, grid_stream);
  }

  Eigen::VectorXd values(cfg.episodes);
  for (int m = 0; m < cfg.episodes; ++m) {
    RandomStream stream = family.stream(
        {stream_tag::kHallucinationEpisode, static_cast<std::uint64_t>(m)});
    Eigen::MatrixXd noise = stream.gaussian_matrix(spec.horizon, spec.state_dim);
    for (int h = 0; h < spec.horizon; ++h)
      noise.row(h) = noise.row(h).cwiseProduct(cfg.noise_std.transpose());
    const RolloutTrace trace =
        cfg.rollout_mode == RolloutMode::kGreedyStep
            ? greedy_rollout(spec, post, beta, ps, profile, agent, grid, noise,
                             objective)
            : beam_rollout(spec, post, beta, ps, profile, agent, grid, noise,
                           objective);
    values(m) = trace.cumulative_rewards(spec.n_agents)(agent);
  }
  ValueEstimate est;
  est.episodes = cfg.episodes;
  est.mean = values.mean();
  if (cfg.episodes > 1) {
    const double var =
        (values.array() - est.mean).square().sum() / (cfg.episodes - 1);
    est.std_error = std::sqrt(var / cfg.episodes);
  }
  return est;
}

}  // namespace detail

/// Optimistic value: mean over episodes of Max rollouts. Episode m always
/// uses the stream {kHallucinationEpisode, m} of `family`, and the eta grid
/// (random mode) the stream {kEtaGrid}, so the three estimates below share
/// all random draws (common random numbers).
inline ValueEstimate ucb_estimate(const MarkovGameSpec& spec,
                                  const GPPosterior& post, const PolicySet& ps,
                                  const ProfileIndex& profile, int agent,
                                  const HallucinationConfig& cfg,
                                  const StreamFamily& family,
                                  std::optional<double> beta_override = {}) {
  return detail::rollout_estimate(spec, post, ps, profile, agent, cfg, family,
                                  RolloutObjective::kMax, beta_override);
}

/// Pessimistic value: Min rollouts on the same streams.
inline ValueEstimate lcb_estimate(const MarkovGameSpec& spec,
                                  const GPPosterior& post, const PolicySet& ps,
                                  const ProfileIndex& profile, int agent,
                                  const HallucinationConfig& cfg,
                                  const StreamFamily& family,
                                  std::optional<double> beta_override = {}) {
  return detail::rollout_estimate(spec, post, ps, profile, agent, cfg, family,
                                  RolloutObjective::kMin, beta_override);
}

/// Posterior-mean value: eta = 0 rollouts on the same streams; beta has no
/// effect on the result.
inline ValueEstimate mean_estimate(const MarkovGameSpec& spec,
                                   const GPPosterior& post, const PolicySet& ps,
                                   const ProfileIndex& profile, int agent,
                                   const HallucinationConfig& cfg,
                                   const StreamFamily& family,
                                   std::optional<double> beta_override = {}) {
  return detail::rollout_estimate(spec, post, ps, profile, agent, cfg, family,
                                  RolloutObjective::kMean, beta_override);
}

}  // namespace hmarl

#endif  // HMARL_HALLUCINATION_HPP_
