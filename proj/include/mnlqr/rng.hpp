// Copyright 2026 the mnlqr authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MNLQR_RNG_HPP_
#define MNLQR_RNG_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

namespace mnlqr {

// Counter-style SplitMix64 generator. The algorithm is fixed by this file, so
// identical seeds produce identical streams on every platform and thread
// count. Independent streams for parallel work are derived with stream(),
// which hashes (seed, stream_id) through two mixing rounds.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
    return Rng(mix(mix(seed) ^ stream_id));
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; the spare value is cached, so draws come
  // in deterministic pairs.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(6.283185307179586476925286766559 * u2);
    has_spare_ = true;
    return r * std::cos(6.283185307179586476925286766559 * u2);
  }

  Eigen::VectorXd gaussian_vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = gaussian();
    return v;
  }

  Eigen::VectorXd unit_sphere(Eigen::Index n) {
    while (true) {
      Eigen::VectorXd v = gaussian_vector(n);
      double norm = v.norm();
      if (norm > 1e-100) return v / norm;
    }
  }

  // Uniform on the solid ball of the given radius: uniform direction and
  // radius proportional to u^(1/n).
  Eigen::VectorXd ball(Eigen::Index n, double radius) {
    double r = radius * std::pow(uniform(), 1.0 / static_cast<double>(n));
    return r * unit_sphere(n);
  }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mnlqr

#endif  // MNLQR_RNG_HPP_
