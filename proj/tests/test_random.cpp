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
#include <set>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "hmarl/random.hpp"

namespace hmarl {
namespace {

TEST_CASE("mix64 scrambles and is stable") {
  CHECK(mix64(0) != 0);
  CHECK(mix64(1) != mix64(2));
  CHECK(mix64(42) == mix64(42));
}

TEST_CASE("derive_key separates paths") {
  std::set<std::uint64_t> keys;
  for (std::uint64_t a = 0; a < 8; ++a)
    for (std::uint64_t b = 0; b < 8; ++b) keys.insert(derive_key(1, {a, b}));
  CHECK(keys.size() == 64);
  CHECK(derive_key(1, {2, 3}) != derive_key(1, {3, 2}));
  CHECK(derive_key(1, {2}) != derive_key(2, {2}));
  CHECK(derive_key(5, {7, 9}) == derive_key(5, {7, 9}));
}

TEST_CASE("streams are reproducible and independent") {
  RandomStream a(derive_key(9, {1}));
  RandomStream b(derive_key(9, {1}));
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  RandomStream c(derive_key(9, {2}));
  bool all_equal = true;
  RandomStream a2(derive_key(9, {1}));
  for (int i = 0; i < 16; ++i)
    if (a2.next_u64() != c.next_u64()) all_equal = false;
  CHECK_FALSE(all_equal);
}

TEST_CASE("uniform01 lies in the unit interval") {
  RandomStream s(123);
  for (int i = 0; i < 2000; ++i) {
    const double u = s.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("uniform respects bounds") {
  RandomStream s(7);
  for (int i = 0; i < 1000; ++i) {
    const double u = s.uniform(-2.0, 3.0);
    CHECK(u >= -2.0);
    CHECK(u <= 3.0);
  }
}

TEST_CASE("gaussian moments are roughly standard") {
  RandomStream s(2024);
  const int n = 20000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = s.gaussian();
    sum += g;
    sum_sq += g * g;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.03);
  CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("gaussian_matrix fills rows first") {
  RandomStream a(55);
  const Eigen::MatrixXd m = a.gaussian_matrix(3, 2);
  RandomStream b(55);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 2; ++c) CHECK(m(r, c) == b.gaussian());
}

TEST_CASE("stream family children differ from leaf streams") {
  StreamFamily root(11);
  const StreamFamily child = root.child({3});
  RandomStream leaf = root.stream({3});
  CHECK(child.key() == derive_key(11, {3}));
  CHECK(leaf.next_u64() == RandomStream(derive_key(11, {3})).next_u64());
  RandomStream nested = child.stream({4});
  CHECK(nested.next_u64() == root.child({3}).stream({4}).next_u64());
}

}  // namespace
}  // namespace hmarl
