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

#ifndef HMARL_RANDOM_HPP_
#define HMARL_RANDOM_HPP_

#include <cmath>
#include <cstdint>
#include <initializer_list>

#include <Eigen/Core>

namespace hmarl {

// SplitMix64 finalizer (Stafford mix13).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Folds a token path into a stream key. Every consumer of randomness in the
/// library addresses its stream by such a path, so any two distinct paths
/// yield statistically independent streams and the whole run is a pure
/// function of the root seed.
inline std::uint64_t derive_key(std::uint64_t root,
                                std::initializer_list<std::uint64_t> path) {
  std::uint64_t key = mix64(root);
  for (std::uint64_t token : path) key = mix64(key ^ mix64(token));
  return key;
}

/// Counter-based generator: output i is a pure function of (key, i).
/// Gaussian variates use the Marsaglia polar method, which needs only sqrt
/// and log, and caches the second variate of each accepted pair.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() { return mix64(key_ ^ mix64(counter_++)); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = uniform(-1.0, 1.0);
      v = uniform(-1.0, 1.0);
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    has_spare_ = true;
    return u * scale;
  }

  Eigen::VectorXd gaussian_vector(int n) {
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i) out(i) = gaussian();
    return out;
  }

  /// Row-major fill: entry (r, c) is drawn before (r, c+1).
  Eigen::MatrixXd gaussian_matrix(int rows, int cols) {
    Eigen::MatrixXd out(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) out(r, c) = gaussian();
    return out;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// A node in the stream-derivation tree. Children and leaf streams are
/// addressed by token paths relative to this node.
class StreamFamily {
 public:
  explicit StreamFamily(std::uint64_t key) : key_(key) {}

  StreamFamily child(std::initializer_list<std::uint64_t> path) const {
    return StreamFamily(derive_key(key_, path));
  }

  RandomStream stream(std::initializer_list<std::uint64_t> path) const {
    return RandomStream(derive_key(key_, path));
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
};

// Reserved path tokens. Keeping them in one place guarantees distinct
// consumers never collide on a derivation path.
namespace stream_tag {
inline constexpr std::uint64_t kTrueTensor = 1;
inline constexpr std::uint64_t kEnvRollout = 2;
inline constexpr std::uint64_t kSampleProfile = 3;
inline constexpr std::uint64_t kHallucinationEpisode = 4;
inline constexpr std::uint64_t kEtaGrid = 5;
inline constexpr std::uint64_t kRound = 6;
inline constexpr std::uint64_t kProfile = 7;
}  // namespace stream_tag

}  // namespace hmarl

#endif  // HMARL_RANDOM_HPP_
