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

#ifndef MNLQR_TESTS_TEST_UTIL_HPP_
#define MNLQR_TESTS_TEST_UTIL_HPP_

#include <Eigen/Dense>

#include "mnlqr/rng.hpp"
#include "mnlqr/symm.hpp"

namespace mnlqr_test {

inline Eigen::MatrixXd random_matrix(mnlqr::Rng& rng, Eigen::Index rows,
                                     Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.gaussian();
  }
  return m;
}

inline mnlqr::SymMat random_symmetric(mnlqr::Rng& rng, Eigen::Index d) {
  Eigen::MatrixXd m = random_matrix(rng, d, d);
  return mnlqr::SymMat(0.5 * (m + m.transpose()));
}

inline mnlqr::SymMat random_psd(mnlqr::Rng& rng, Eigen::Index d) {
  Eigen::MatrixXd m = random_matrix(rng, d, d);
  return mnlqr::SymMat(m * m.transpose());
}

}  // namespace mnlqr_test

#endif  // MNLQR_TESTS_TEST_UTIL_HPP_
