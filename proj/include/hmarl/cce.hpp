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

#ifndef HMARL_CCE_HPP_
#define HMARL_CCE_HPP_

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "hmarl/random.hpp"

namespace hmarl {

/// Per-agent payoffs of a finite normal-form game over all joint policy
/// profiles. Profiles are flattened in row-major order with agent 0 slowest:
/// flat = ((j_0 * K_1 + j_1) * K_2 + j_2) * ...
class PayoffTensor {
 public:
  explicit PayoffTensor(std::vector<int> shape) : shape_(std::move(shape)) {
    if (shape_.empty()) throw std::invalid_argument("payoff tensor: empty shape");
    n_profiles_ = 1;
    for (int k : shape_) {
      if (k < 1) throw std::invalid_argument("payoff tensor: K_i must be >= 1");
      n_profiles_ *= k;
    }
    values_.assign(shape_.size(), Eigen::VectorXd::Zero(n_profiles_));
  }

  int n_agents() const { return static_cast<int>(shape_.size()); }
  int n_profiles() const { return n_profiles_; }
  const std::vector<int>& shape() const { return shape_; }

  int flat_index(const std::vector<int>& profile) const {
    if (static_cast<int>(profile.size()) != n_agents())
      throw std::invalid_argument("payoff tensor: profile arity mismatch");
    int flat = 0;
    for (int i = 0; i < n_agents(); ++i) {
      if (profile[i] < 0 || profile[i] >= shape_[i])
        throw std::out_of_range("payoff tensor: profile index out of range");
      flat = flat * shape_[i] + profile[i];
    }
    return flat;
  }

  std::vector<int> profile_at(int flat) const {
    std::vector<int> profile(n_agents());
    for (int i = n_agents() - 1; i >= 0; --i) {
      profile[i] = flat % shape_[i];
      flat /= shape_[i];
    }
    return profile;
  }

  /// Stride of agent i's coordinate in the flat ordering.
  int stride(int agent) const {
    int s = 1;
    for (int j = n_agents() - 1; j > agent; --j) s *= shape_[j];
    return s;
  }

  double value(int agent, int flat) const { return values_[agent](flat); }

  void set_value(int agent, int flat, double v) {
    if (!std::isfinite(v)) throw std::runtime_error("non-finite tensor");
    values_[agent](flat) = v;
  }

  const Eigen::VectorXd& agent_values(int agent) const { return values_[agent]; }

  bool is_finite() const {
    for (const auto& v : values_)
      if (!v.allFinite()) return false;
    return true;
  }

 private:
  std::vector<int> shape_;
  int n_profiles_ = 0;
  std::vector<Eigen::VectorXd> values_;
};

/// A distribution over joint profiles (flat indexing as in PayoffTensor).
/// Construction renormalizes, so probs() always sums to 1 exactly up to
/// floating-point roundoff.
class MixedProfile {
 public:
  explicit MixedProfile(Eigen::VectorXd weights) : probs_(std::move(weights)) {
    if (probs_.size() == 0)
      throw std::invalid_argument("mixed profile: empty weight vector");
    if (!probs_.allFinite())
      throw std::invalid_argument("mixed profile: non-finite weights");
    double total = 0.0;
    for (Eigen::Index i = 0; i < probs_.size(); ++i) {
      if (probs_(i) < 0.0) {
        if (probs_(i) < -1e-12)
          throw std::invalid_argument("mixed profile: negative weight");
        probs_(i) = 0.0;
      }
      total += probs_(i);
    }
    if (total <= 0.0)
      throw std::invalid_argument("mixed profile: zero total mass");
    probs_ /= total;
  }

  static MixedProfile uniform(int n) {
    return MixedProfile(Eigen::VectorXd::Constant(n, 1.0));
  }

  static MixedProfile point_mass(int n, int flat) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    w(flat) = 1.0;
    return MixedProfile(std::move(w));
  }

  const Eigen::VectorXd& probs() const { return probs_; }
  int size() const { return static_cast<int>(probs_.size()); }

  /// Inverse-CDF sample of a flat profile index.
  int sample(RandomStream& stream) const {
    const double u = stream.uniform01();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < probs_.size(); ++i) {
      acc += probs_(i);
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs_.size() - 1);
  }

 private:
  Eigen::VectorXd probs_;
};

struct HedgeConfig {
  int iterations = 10000;
  /// Unset: per-agent rate sqrt(8 ln K_i / iterations).
  std::optional<double> learning_rate;
  /// When positive, iteration stops early once the running average's
  /// exploitability (checked every 100 iterations) drops to this level.
  double target_eps = 0.0;
};

/// E_{pi ~ P}[U^i(pi)].
inline double expected_value(const PayoffTensor& tensor, const MixedProfile& p,
                             int agent) {
  if (p.size() != tensor.n_profiles())
    throw std::invalid_argument("shape mismatch");
  return tensor.agent_values(agent).dot(p.probs());
}

/// Best fixed deviation for one agent against the marginal of everyone else:
/// max_k E_{pi ~ P}[U^i(k, pi^{-i})], with its argmax (ties to lowest index).
struct BestResponse {
  double value;
  int policy;
};

inline BestResponse best_response_value(const PayoffTensor& tensor,
                                        const MixedProfile& p, int agent) {
  if (p.size() != tensor.n_profiles())
    throw std::invalid_argument("shape mismatch");
  const int k_agent = tensor.shape()[agent];
  const int stride = tensor.stride(agent);
  Eigen::VectorXd deviation = Eigen::VectorXd::Zero(k_agent);
  for (int f = 0; f < tensor.n_profiles(); ++f) {
    const double mass = p.probs()(f);
    if (mass == 0.0) continue;
    const int own = (f / stride) % k_agent;
    const int base = f - own * stride;
    for (int k = 0; k < k_agent; ++k)
      deviation(k) += mass * tensor.value(agent, base + k * stride);
  }
  int best = 0;
  for (int k = 1; k < k_agent; ++k)
    if (deviation(k) > deviation(best)) best = k;
  return {deviation(best), best};
}

/// Per-agent exploitability eps_i = max_k E_{P^{-i}}[U^i(k, .)] - E_P[U^i]
/// and its maximum over agents. No clamping is applied; for product
/// distributions the values are nonnegative by definition.
struct ExploitabilityResult {
  Eigen::VectorXd per_agent;
  double max;
};

inline ExploitabilityResult exploitability(const PayoffTensor& tensor,
                                           const MixedProfile& p) {
  if (!tensor.is_finite()) throw std::runtime_error("non-finite tensor");
  const int n = tensor.n_agents();
  Eigen::VectorXd eps(n);
  for (int i = 0; i < n; ++i)
    eps(i) = best_response_value(tensor, p, i).value - expected_value(tensor, p, i);
  return {eps, eps.maxCoeff()};
}

inline bool is_eps_cce(const PayoffTensor& tensor, const MixedProfile& p,
                       double eps) {
  return exploitability(tensor, p).max <= eps;
}

/// Hedge (multiplicative weights) self-play over the joint game. Each agent
/// runs Hedge on its own policies against the product of the other agents'
/// current mixtures; the returned distribution is the uniform time average
/// of the per-iteration joint product distributions, which converges to the
/// set of coarse correlated equilibria.
///
/// Payoffs are range-normalized to [0, 1] per agent for the update, so the
/// output is invariant under per-agent positive affine payoff maps. The
/// procedure is deterministic; `rng` is reserved for optional tie
/// perturbation and unused by default.
inline MixedProfile hedge_selfplay(const PayoffTensor& tensor,
                                   const HedgeConfig& cfg,
                                   RandomStream* rng = nullptr) {
  (void)rng;
  if (!tensor.is_finite()) throw std::runtime_error("non-finite tensor");
  if (cfg.iterations < 1)
    throw std::invalid_argument("hedge: iterations must be >= 1");
  if (cfg.learning_rate && *cfg.learning_rate <= 0.0)
    throw std::invalid_argument("hedge: learning rate must be > 0");

  const int n = tensor.n_agents();
  const int profiles = tensor.n_profiles();

  // Per-agent range normalization to [0, 1]; a constant payoff row maps to 0.
  std::vector<Eigen::VectorXd> payoff(n);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd& u = tensor.agent_values(i);
    const double lo = u.minCoeff();
    const double range = u.maxCoeff() - lo;
    if (range > 0.0)
      payoff[i] = ((u.array() - lo) / range).matrix();
    else
      payoff[i] = Eigen::VectorXd::Zero(profiles);
  }

  // Decode per-agent indices once.
  std::vector<std::vector<int>> index_of(n, std::vector<int>(profiles));
  for (int f = 0; f < profiles; ++f) {
    const std::vector<int> prof = tensor.profile_at(f);
    for (int i = 0; i < n; ++i) index_of[i][f] = prof[i];
  }

  std::vector<Eigen::VectorXd> mix(n);
  std::vector<double> rate(n);
  for (int i = 0; i < n; ++i) {
    const int k = tensor.shape()[i];
    mix[i] = Eigen::VectorXd::Constant(k, 1.0 / k);
    rate[i] = cfg.learning_rate
                  ? *cfg.learning_rate
                  : std::sqrt(8.0 * std::log(static_cast<double>(k)) /
                              static_cast<double>(cfg.iterations));
  }

  Eigen::VectorXd average = Eigen::VectorXd::Zero(profiles);
  Eigen::VectorXd joint(profiles);
  int played = 0;
  for (int iter = 1; iter <= cfg.iterations; ++iter) {
    for (int f = 0; f < profiles; ++f) {
      double w = 1.0;
      for (int i = 0; i < n; ++i) w *= mix[i](index_of[i][f]);
      joint(f) = w;
    }
    average += joint;
    ++played;

    for (int i = 0; i < n; ++i) {
      const int k_i = tensor.shape()[i];
      if (k_i == 1) continue;
      Eigen::VectorXd gain = Eigen::VectorXd::Zero(k_i);
      for (int f = 0; f < profiles; ++f) {
        double w = 1.0;
        for (int j = 0; j < n; ++j)
          if (j != i) w *= mix[j](index_of[j][f]);
        gain(index_of[i][f]) += w * payoff[i](f);
      }
      // Shift by the max before exponentiating to keep weights in range.
      const double top = gain.maxCoeff();
      for (int k = 0; k < k_i; ++k)
        mix[i](k) *= std::exp(rate[i] * (gain(k) - top));
      mix[i] /= mix[i].sum();
    }

    if (cfg.target_eps > 0.0 && iter % 100 == 0) {
      MixedProfile running(average);
      if (exploitability(tensor, running).max <= cfg.target_eps) break;
    }
  }
  (void)played;
  return MixedProfile(std::move(average));
}

}  // namespace hmarl

#endif  // HMARL_CCE_HPP_
