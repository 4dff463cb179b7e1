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

#include <cmath>
#include <limits>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "hmarl/cce.hpp"
#include "hmarl/random.hpp"

namespace hmarl {
namespace {

PayoffTensor matching_pennies() {
  PayoffTensor t({2, 2});
  const double u0[] = {1.0, -1.0, -1.0, 1.0};
  for (int f = 0; f < 4; ++f) {
    t.set_value(0, f, u0[f]);
    t.set_value(1, f, -u0[f]);
  }
  return t;
}

PayoffTensor random_tensor(const std::vector<int>& shape, RandomStream* stream) {
  PayoffTensor t(shape);
  for (int i = 0; i < t.n_agents(); ++i)
    for (int f = 0; f < t.n_profiles(); ++f)
      t.set_value(i, f, stream->gaussian());
  return t;
}

// Deviation values recomputed by direct enumeration over joint profiles,
// without the stride shortcut used by best_response_value.
double brute_force_best_response(const PayoffTensor& tensor,
                                 const MixedProfile& p, int agent) {
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < tensor.shape()[agent]; ++k) {
    double acc = 0.0;
    for (int f = 0; f < tensor.n_profiles(); ++f) {
      std::vector<int> profile = tensor.profile_at(f);
      profile[agent] = k;
      acc += p.probs()(f) * tensor.value(agent, tensor.flat_index(profile));
    }
    best = std::max(best, acc);
  }
  return best;
}

double payoff_range(const PayoffTensor& tensor) {
  double range = 0.0;
  for (int i = 0; i < tensor.n_agents(); ++i) {
    const Eigen::VectorXd& u = tensor.agent_values(i);
    range = std::max(range, u.maxCoeff() - u.minCoeff());
  }
  return range;
}

TEST_CASE("flat indexing is row-major with agent 0 slowest") {
  PayoffTensor t({3, 4});
  CHECK(t.n_profiles() == 12);
  CHECK(t.stride(0) == 4);
  CHECK(t.stride(1) == 1);
  CHECK(t.flat_index({2, 3}) == 11);
  CHECK(t.flat_index({1, 0}) == 4);
  for (int f = 0; f < 12; ++f) CHECK(t.flat_index(t.profile_at(f)) == f);
  CHECK_THROWS(t.flat_index({3, 0}));
  CHECK_THROWS(t.flat_index({0, -1}));
  CHECK_THROWS(t.flat_index({0, 0, 0}));
  CHECK_THROWS(PayoffTensor({2, 0}));
  CHECK_THROWS(PayoffTensor(std::vector<int>{}));
  CHECK_THROWS_WITH(t.set_value(0, 0, std::numeric_limits<double>::infinity()),
                    "non-finite tensor");
}

TEST_CASE("uniform play is an exact equilibrium of matching pennies") {
  const PayoffTensor t = matching_pennies();
  const MixedProfile uniform = MixedProfile::uniform(4);
  const ExploitabilityResult r = exploitability(t, uniform);
  CHECK(r.per_agent(0) == 0.0);
  CHECK(r.per_agent(1) == 0.0);
  CHECK(r.max == 0.0);
  CHECK(is_eps_cce(t, uniform, 0.0));
  CHECK(expected_value(t, uniform, 0) == 0.0);
}

TEST_CASE("hedge stays at the symmetric fixed point of matching pennies") {
  const PayoffTensor t = matching_pennies();
  const MixedProfile out = hedge_selfplay(t, HedgeConfig{});
  for (int f = 0; f < 4; ++f)
    CHECK(out.probs()(f) == Catch::Approx(0.25).margin(1e-12));
  CHECK(exploitability(t, out).max <= 1e-9);
}

TEST_CASE("hedge concentrates on strictly dominant actions") {
  PayoffTensor t({2, 2});
  for (int f = 0; f < 4; ++f) {
    const std::vector<int> profile = t.profile_at(f);
    t.set_value(0, f, profile[0] == 0 ? 1.0 : 0.0);
    t.set_value(1, f, profile[1] == 0 ? 1.0 : 0.0);
  }
  const MixedProfile out = hedge_selfplay(t, HedgeConfig{});
  CHECK(out.probs()(t.flat_index({0, 0})) >= 0.99);
  CHECK(exploitability(t, out).max <= 0.02);

  const MixedProfile point = MixedProfile::point_mass(4, t.flat_index({0, 0}));
  CHECK(exploitability(t, point).max == 0.0);
}

TEST_CASE("single-action agents give a degenerate equilibrium") {
  PayoffTensor t({1, 1});
  t.set_value(0, 0, 3.5);
  t.set_value(1, 0, -2.0);
  const MixedProfile out = hedge_selfplay(t, HedgeConfig{});
  CHECK(out.probs()(0) == 1.0);
  CHECK(exploitability(t, out).max == 0.0);
}

TEST_CASE("hedge reaches low exploitability on random games") {
  RandomStream stream(2024);
  for (int trial = 0; trial < 5; ++trial) {
    const PayoffTensor t = random_tensor({4, 4}, &stream);
    const MixedProfile out = hedge_selfplay(t, HedgeConfig{});
    const ExploitabilityResult r = exploitability(t, out);
    const double range = payoff_range(t);
    CHECK(r.max <= 0.05 * range);
    // The stride-based evaluation must agree with direct enumeration.
    for (int i = 0; i < 2; ++i) {
      const double brute = brute_force_best_response(t, out, i);
      CHECK(best_response_value(t, out, i).value ==
            Catch::Approx(brute).margin(1e-12 * (1.0 + std::abs(brute))));
      CHECK(r.per_agent(i) ==
            Catch::Approx(brute - expected_value(t, out, i))
                .margin(1e-12 * (1.0 + std::abs(brute))));
    }
  }
}

TEST_CASE("best response enumerations") {
  const PayoffTensor pennies = matching_pennies();
  const MixedProfile heads = MixedProfile::point_mass(4, 0);
  const BestResponse br0 = best_response_value(pennies, heads, 0);
  CHECK(br0.value == 1.0);
  CHECK(br0.policy == 0);
  const BestResponse br1 = best_response_value(pennies, heads, 1);
  CHECK(br1.value == 1.0);
  CHECK(br1.policy == 1);

  PayoffTensor ramp({3, 3});
  for (int f = 0; f < 9; ++f) {
    ramp.set_value(0, f, static_cast<double>(f));
    ramp.set_value(1, f, 1.0);
  }
  const MixedProfile uniform = MixedProfile::uniform(9);
  const BestResponse ramp0 = best_response_value(ramp, uniform, 0);
  CHECK(ramp0.value == Catch::Approx(7.0).margin(1e-12));
  CHECK(ramp0.policy == 2);
  // Constant payoffs tie everywhere; lowest index wins.
  CHECK(best_response_value(ramp, uniform, 1).policy == 0);
}

TEST_CASE("hedge output is invariant under positive affine payoff maps") {
  RandomStream stream(5150);
  PayoffTensor base({3, 3});
  for (int i = 0; i < 2; ++i)
    for (int f = 0; f < 9; ++f)
      base.set_value(i, f, static_cast<double>(
                               static_cast<int>(stream.uniform_index(17)) - 8));
  PayoffTensor mapped({3, 3});
  for (int i = 0; i < 2; ++i)
    for (int f = 0; f < 9; ++f)
      mapped.set_value(i, f, 2.0 * base.value(i, f) + 0.25);

  const MixedProfile out_base = hedge_selfplay(base, HedgeConfig{});
  const MixedProfile out_mapped = hedge_selfplay(mapped, HedgeConfig{});
  for (int f = 0; f < 9; ++f)
    CHECK(out_base.probs()(f) == out_mapped.probs()(f));

  const ExploitabilityResult eps_base = exploitability(base, out_base);
  const ExploitabilityResult eps_mapped = exploitability(mapped, out_base);
  const double range = payoff_range(mapped);
  for (int i = 0; i < 2; ++i)
    CHECK(eps_mapped.per_agent(i) ==
          Catch::Approx(2.0 * eps_base.per_agent(i)).margin(1e-12 * (1.0 + range)));
}

TEST_CASE("longer hedge runs do not lose ground") {
  RandomStream stream(31337);
  for (int trial = 0; trial < 3; ++trial) {
    const PayoffTensor t = random_tensor({3, 3}, &stream);
    HedgeConfig coarse;
    coarse.iterations = 100;
    HedgeConfig fine;
    fine.iterations = 10000;
    const double e_coarse = exploitability(t, hedge_selfplay(t, coarse)).max;
    const double e_fine = exploitability(t, hedge_selfplay(t, fine)).max;
    CHECK(e_fine <= e_coarse + 1e-12);
  }
}

TEST_CASE("early stopping returns the same average as a short run") {
  RandomStream stream(99);
  const PayoffTensor t = random_tensor({3, 3}, &stream);
  HedgeConfig stopped;
  stopped.iterations = 10000;
  stopped.learning_rate = 0.05;
  stopped.target_eps = 1e9;  // satisfied at the first check
  HedgeConfig short_run;
  short_run.iterations = 100;
  short_run.learning_rate = 0.05;
  const MixedProfile a = hedge_selfplay(t, stopped);
  const MixedProfile b = hedge_selfplay(t, short_run);
  for (int f = 0; f < t.n_profiles(); ++f)
    CHECK(a.probs()(f) == b.probs()(f));
}

TEST_CASE("product distributions are never negatively exploitable") {
  RandomStream stream(808);
  for (int trial = 0; trial < 20; ++trial) {
    const PayoffTensor t = random_tensor({3, 2, 2}, &stream);
    std::vector<Eigen::VectorXd> mixes;
    for (int k : t.shape()) {
      Eigen::VectorXd m(k);
      for (int j = 0; j < k; ++j) m(j) = stream.uniform(0.01, 1.0);
      mixes.push_back(m / m.sum());
    }
    Eigen::VectorXd joint(t.n_profiles());
    for (int f = 0; f < t.n_profiles(); ++f) {
      const std::vector<int> profile = t.profile_at(f);
      double w = 1.0;
      for (int i = 0; i < t.n_agents(); ++i) w *= mixes[i](profile[i]);
      joint(f) = w;
    }
    const ExploitabilityResult r = exploitability(t, MixedProfile(joint));
    for (int i = 0; i < t.n_agents(); ++i) CHECK(r.per_agent(i) >= -1e-12);
  }
}

TEST_CASE("mixed profiles renormalize and sample correctly") {
  Eigen::VectorXd w(4);
  w << 2.0, 0.0, 6.0, 0.0;
  const MixedProfile p(w);
  CHECK(p.probs()(0) == 0.25);
  CHECK(p.probs()(2) == 0.75);
  CHECK(p.probs().sum() == Catch::Approx(1.0).margin(1e-15));

  Eigen::VectorXd tiny_negative(2);
  tiny_negative << 1.0, -1e-13;
  CHECK(MixedProfile(tiny_negative).probs()(1) == 0.0);

  Eigen::VectorXd bad(2);
  bad << 1.0, -1e-6;
  CHECK_THROWS(MixedProfile(bad));
  CHECK_THROWS(MixedProfile(Eigen::VectorXd::Zero(3)));
  CHECK_THROWS(MixedProfile(Eigen::VectorXd(0)));
  Eigen::VectorXd nan_weights(2);
  nan_weights << 1.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS(MixedProfile(nan_weights));

  RandomStream stream(4242);
  const MixedProfile point = MixedProfile::point_mass(5, 3);
  for (int i = 0; i < 50; ++i) CHECK(point.sample(stream) == 3);

  const MixedProfile uniform = MixedProfile::uniform(4);
  std::vector<int> counts(4, 0);
  for (int i = 0; i < 4000; ++i) ++counts[uniform.sample(stream)];
  for (int k = 0; k < 4; ++k) {
    CHECK(counts[k] > 800);
    CHECK(counts[k] < 1200);
  }
}

TEST_CASE("hedge validates its configuration") {
  const PayoffTensor t = matching_pennies();
  HedgeConfig bad_iters;
  bad_iters.iterations = 0;
  CHECK_THROWS_WITH(hedge_selfplay(t, bad_iters),
                    "hedge: iterations must be >= 1");
  HedgeConfig bad_rate;
  bad_rate.learning_rate = 0.0;
  CHECK_THROWS_WITH(hedge_selfplay(t, bad_rate),
                    "hedge: learning rate must be > 0");
  const MixedProfile uniform = MixedProfile::uniform(4);
  const PayoffTensor wrong({3, 3});
  CHECK_THROWS(expected_value(wrong, uniform, 0));
  CHECK_THROWS(best_response_value(wrong, uniform, 0));
}

}  // namespace
}  // namespace hmarl
