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

#ifndef MNLQR_CONCENTRATION_HPP_
#define MNLQR_CONCENTRATION_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "mnlqr/errors.hpp"
#include "mnlqr/symm.hpp"

namespace mnlqr {

struct ConfidenceSpec {
  double delta;
  Eigen::Index dimension;

  ConfidenceSpec(double delta_, Eigen::Index dimension_)
      : delta(delta_), dimension(dimension_) {
    if (!(delta > 0.0 && delta < 1.0)) {
      throw InvalidDelta("delta must lie in (0, 1), got " + std::to_string(delta));
    }
  }
};

inline void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidDelta("delta must lie in (0, 1), got " + std::to_string(delta));
  }
}

// Two-sided matrix Hoeffding radius: for independent zero-mean symmetric
// d-by-d matrices with ||X_i||_2 <= gamma_i a.s.,
//   P[ ||sum_i X_i||_2 >= beta ] <= delta  for  beta = ||gamma||_2 sqrt(2 ln(2d/delta)).
inline double matrix_hoeffding_radius(const Eigen::VectorXd& gammas,
                                      Eigen::Index d, double delta) {
  check_delta(delta);
  for (Eigen::Index i = 0; i < gammas.size(); ++i) {
    if (gammas[i] < 0.0) {
      throw Error("per-term bounds must be nonnegative");
    }
  }
  return gammas.norm() *
         std::sqrt(2.0 * std::log(2.0 * static_cast<double>(d) / delta));
}

// Vector Hoeffding radius: for independent vectors with ||x_i|| <= gamma_i,
//   P[ ||sum_i (x_i - E x_i)|| >= r ] <= delta
// for r = ||gamma||_2 (2 + sqrt(2 ln(1/delta))).
inline double vector_hoeffding_radius(const Eigen::VectorXd& gammas,
                                      double delta) {
  check_delta(delta);
  for (Eigen::Index i = 0; i < gammas.size(); ++i) {
    if (gammas[i] < 0.0) {
      throw Error("per-term bounds must be nonnegative");
    }
  }
  return gammas.norm() * (2.0 + std::sqrt(2.0 * std::log(1.0 / delta)));
}

struct DirectMomentBound {
  SymMat w_hat;
  double beta;
};

// Empirical second moment of directly observed disturbances with its
// finite-sample radius beta = r_w^2 sqrt(2 ln(2 n_w / delta) / N); the true
// second moment lies within beta in spectral norm with probability 1-delta.
inline DirectMomentBound direct_moment_bound(
    const std::vector<Eigen::VectorXd>& samples, double r_w, double delta) {
  check_delta(delta);
  if (samples.empty()) {
    throw InsufficientSamples("direct_moment_bound needs at least one sample");
  }
  const Eigen::Index nw = samples[0].size();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(nw, nw);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Eigen::VectorXd& w = samples[i];
    if (w.size() != nw) {
      throw ShapeMismatch("all samples must share one dimension");
    }
    const double norm = w.norm();
    if (norm > r_w * (1.0 + 1e-12)) {
      throw NormBoundViolated(i, norm, r_w);
    }
    acc += w * w.transpose();
  }
  const double n = static_cast<double>(samples.size());
  DirectMomentBound out;
  out.w_hat = SymMat(acc / n, 1e-9);
  out.beta = r_w * r_w *
             std::sqrt(2.0 * std::log(2.0 * static_cast<double>(nw) / delta) / n);
  return out;
}

}  // namespace mnlqr

#endif  // MNLQR_CONCENTRATION_HPP_
