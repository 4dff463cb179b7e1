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

#ifndef HMARL_GP_HPP_
#define HMARL_GP_HPP_

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "hmarl/env.hpp"

namespace hmarl {

enum class KernelKind { kSquaredExponential, kMatern52 };

struct KernelSpec {
  KernelKind kind = KernelKind::kSquaredExponential;
  Eigen::VectorXd lengthscales;  // ARD, one per input dimension
  double signal_variance = 0.05;

  void validate(int input_dim) const {
    if (static_cast<int>(lengthscales.size()) != input_dim)
      throw std::invalid_argument("kernel: lengthscale dim mismatch");
    if ((lengthscales.array() <= 0.0).any())
      throw std::invalid_argument("kernel: lengthscales must be > 0");
    if (!(signal_variance > 0.0))
      throw std::invalid_argument("kernel: signal variance must be > 0");
  }

  bool operator==(const KernelSpec& other) const {
    return kind == other.kind && signal_variance == other.signal_variance &&
           lengthscales.size() == other.lengthscales.size() &&
           lengthscales == other.lengthscales;
  }
};

inline double kernel_eval(const KernelSpec& k, const Eigen::VectorXd& x1,
                          const Eigen::VectorXd& x2) {
  const double r2 =
      ((x1 - x2).array() / k.lengthscales.array()).square().sum();
  switch (k.kind) {
    case KernelKind::kSquaredExponential:
      return k.signal_variance * std::exp(-0.5 * r2);
    case KernelKind::kMatern52: {
      const double r = std::sqrt(r2);
      const double c = std::sqrt(5.0) * r;
      return k.signal_variance * (1.0 + c + 5.0 * r2 / 3.0) * std::exp(-c);
    }
  }
  throw std::logic_error("unknown kernel kind");
}

/// Observed (state ⊕ joint action) -> state-delta pairs. Append-only.
class TransitionDataset {
 public:
  TransitionDataset(int input_dim, int target_dim)
      : inputs_(0, input_dim), targets_(0, target_dim) {
    if (input_dim < 1 || target_dim < 1)
      throw std::invalid_argument("dataset: dims must be >= 1");
  }

  void append(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets) {
    if (inputs.rows() != targets.rows())
      throw std::invalid_argument("dataset: row count mismatch");
    if (inputs.cols() != inputs_.cols() || targets.cols() != targets_.cols())
      throw std::invalid_argument("dataset: column dim mismatch");
    if (!inputs.allFinite() || !targets.allFinite())
      throw std::runtime_error("non-finite state/action");
    const Eigen::Index old_rows = inputs_.rows();
    inputs_.conservativeResize(old_rows + inputs.rows(), Eigen::NoChange);
    targets_.conservativeResize(old_rows + targets.rows(), Eigen::NoChange);
    inputs_.bottomRows(inputs.rows()) = inputs;
    targets_.bottomRows(targets.rows()) = targets;
  }

  void append(const Eigen::VectorXd& input, const Eigen::VectorXd& target) {
    append(Eigen::MatrixXd(input.transpose()),
           Eigen::MatrixXd(target.transpose()));
  }

  int size() const { return static_cast<int>(inputs_.rows()); }
  int input_dim() const { return static_cast<int>(inputs_.cols()); }
  int target_dim() const { return static_cast<int>(targets_.cols()); }
  const Eigen::MatrixXd& inputs() const { return inputs_; }
  const Eigen::MatrixXd& targets() const { return targets_; }

 private:
  Eigen::MatrixXd inputs_;
  Eigen::MatrixXd targets_;
};

/// Exact per-coordinate GP posterior over state deltas. Output coordinates
/// with identical kernels share one Cholesky factor; each keeps its own
/// weight vector.
class GPPosterior {
 public:
  GPPosterior(TransitionDataset data, std::vector<KernelSpec> kernels,
              double noise_variance)
      : data_(std::move(data)),
        kernels_(std::move(kernels)),
        noise_variance_(noise_variance) {
    if (!(noise_variance_ > 0.0))
      throw std::invalid_argument("gp: noise variance must be > 0");
    if (static_cast<int>(kernels_.size()) != data_.target_dim())
      throw std::invalid_argument("gp: one kernel per output coordinate");
    for (const KernelSpec& k : kernels_) k.validate(data_.input_dim());
    build_groups();
    factorize();
  }

  int n_points() const { return data_.size(); }
  int input_dim() const { return data_.input_dim(); }
  int target_dim() const { return data_.target_dim(); }
  double noise_variance() const { return noise_variance_; }
  const std::vector<KernelSpec>& kernels() const { return kernels_; }
  const TransitionDataset& data() const { return data_; }

  /// Posterior mean and std of the delta at raw input x.
  void predict_delta(const Eigen::VectorXd& x, Eigen::VectorXd* mean,
                     Eigen::VectorXd* std_out) const {
    if (x.size() != data_.input_dim())
      throw std::invalid_argument("gp: query dim mismatch");
    if (!x.allFinite()) throw std::runtime_error("non-finite state/action");
    const int p = data_.target_dim();
    mean->resize(p);
    std_out->resize(p);
    const int n = data_.size();
    Eigen::VectorXd k_vec(n);
    for (const FactorGroup& g : groups_) {
      const double prior = kernel_eval(g.kernel, x, x);
      if (n == 0) {
        for (int c : g.coords) {
          (*mean)(c) = 0.0;
          (*std_out)(c) = std::sqrt(prior);
        }
        continue;
      }
      for (int r = 0; r < n; ++r)
        k_vec(r) = kernel_eval(g.kernel, x, data_.inputs().row(r).transpose());
      const Eigen::VectorXd v =
          g.factor.triangularView<Eigen::Lower>().solve(k_vec);
      double var = prior - v.squaredNorm();
      if (var < 0.0) {
        if (var < -1e-12)
          throw std::runtime_error("gp: negative predictive variance");
        var = 0.0;
      }
      const double sd = std::sqrt(var);
      for (std::size_t j = 0; j < g.coords.size(); ++j) {
        (*mean)(g.coords[j]) = k_vec.dot(g.alphas[j]);
        (*std_out)(g.coords[j]) = sd;
      }
    }
  }

 private:
  struct FactorGroup {
    KernelSpec kernel;
    std::vector<int> coords;
    Eigen::MatrixXd factor;             // lower-triangular L, n x n
    std::vector<Eigen::VectorXd> alphas;  // one per coordinate in the group
  };

  void build_groups() {
    for (int c = 0; c < data_.target_dim(); ++c) {
      bool placed = false;
      for (FactorGroup& g : groups_) {
        if (g.kernel == kernels_[c]) {
          g.coords.push_back(c);
          placed = true;
          break;
        }
      }
      if (!placed) groups_.push_back({kernels_[c], {c}, {}, {}});
    }
  }

  void factorize() {
    const int n = data_.size();
    if (n == 0) return;
    for (FactorGroup& g : groups_) {
      Eigen::MatrixXd gram(n, n);
      for (int r = 0; r < n; ++r) {
        for (int c = 0; c <= r; ++c) {
          const double v = kernel_eval(g.kernel, data_.inputs().row(r).transpose(),
                                       data_.inputs().row(c).transpose());
          gram(r, c) = v;
          gram(c, r) = v;
        }
      }
      gram.diagonal().array() += noise_variance_;

      // Jitter ladder: 1e-9 * signal_variance, x10 per retry, up to 1e-5.
      bool ok = false;
      Eigen::LLT<Eigen::MatrixXd> llt;
      for (double jitter = 1e-9 * g.kernel.signal_variance;
           jitter <= 1e-5 * g.kernel.signal_variance * (1.0 + 1e-12);
           jitter *= 10.0) {
        Eigen::MatrixXd jittered = gram;
        jittered.diagonal().array() += jitter;
        llt.compute(jittered);
        if (llt.info() == Eigen::Success) {
          ok = true;
          break;
        }
      }
      if (!ok) throw std::runtime_error("ill-conditioned Gram matrix");
      g.factor = llt.matrixL();
      g.alphas.reserve(g.coords.size());
      for (int c : g.coords)
        g.alphas.push_back(llt.solve(data_.targets().col(c)));
    }
  }

  TransitionDataset data_;
  std::vector<KernelSpec> kernels_;
  double noise_variance_;
  std::vector<FactorGroup> groups_;
};

inline GPPosterior gp_fit(TransitionDataset data, std::vector<KernelSpec> kernels,
                          double noise_variance) {
  return GPPosterior(std::move(data), std::move(kernels), noise_variance);
}

struct Prediction {
  StateVector mean_next;
  Eigen::VectorXd std;
};

inline Eigen::VectorXd flatten_input(const StateVector& s, const JointAction& a) {
  Eigen::Index total = s.size();
  for (const ActionVector& ai : a) total += ai.size();
  Eigen::VectorXd x(total);
  x.head(s.size()) = s;
  Eigen::Index at = s.size();
  for (const ActionVector& ai : a) {
    x.segment(at, ai.size()) = ai;
    at += ai.size();
  }
  return x;
}

/// mean_next = s + posterior delta mean; std is the delta's posterior std.
inline Prediction gp_predict(const GPPosterior& post, const StateVector& s,
                             const JointAction& a) {
  if (s.size() != post.target_dim())
    throw std::invalid_argument("gp: query dim mismatch");
  const Eigen::VectorXd x = flatten_input(s, a);
  Prediction out;
  Eigen::VectorXd delta_mean;
  post.predict_delta(x, &delta_mean, &out.std);
  out.mean_next = s + delta_mean;
  return out;
}

/// Full refit on the concatenated dataset.
inline GPPosterior gp_update(const GPPosterior& post,
                             const Eigen::MatrixXd& new_inputs,
                             const Eigen::MatrixXd& new_targets) {
  TransitionDataset data = post.data();
  if (new_inputs.rows() > 0) data.append(new_inputs, new_targets);
  return GPPosterior(std::move(data), post.kernels(), post.noise_variance());
}

enum class BetaKind { kConstant, kLogGrowth };

struct BetaSchedule {
  BetaKind kind = BetaKind::kConstant;
  double value = 1.0;  // beta for Constant, scale c for LogGrowth
  double delta = 0.1;  // documented confidence level; no runtime branching

  void validate() const {
    if (!(value > 0.0)) throw std::invalid_argument("beta schedule: value must be > 0");
    if (!(delta > 0.0) || !(delta < 1.0))
      throw std::invalid_argument("beta schedule: delta must be in (0,1)");
  }
};

inline double beta_value(const BetaSchedule& sched, int n_points) {
  if (n_points < 0) throw std::invalid_argument("beta: n_points must be >= 0");
  switch (sched.kind) {
    case BetaKind::kConstant:
      return sched.value;
    case BetaKind::kLogGrowth:
      return sched.value * std::sqrt(1.0 + std::log1p(static_cast<double>(n_points)));
  }
  throw std::logic_error("unknown beta schedule");
}

}  // namespace hmarl

#endif  // HMARL_GP_HPP_
