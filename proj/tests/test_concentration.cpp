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

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "mnlqr/concentration.hpp"
#include "mnlqr/simulate.hpp"
#include "test_util.hpp"

using mnlqr::direct_moment_bound;
using mnlqr::matrix_hoeffding_radius;
using mnlqr::SymMat;
using mnlqr::vector_hoeffding_radius;

TEST_CASE("confidence spec validation", "[concentration]") {
  CHECK_NOTHROW(mnlqr::ConfidenceSpec(0.05, 3));
  CHECK_THROWS_AS(mnlqr::ConfidenceSpec(0.0, 3), mnlqr::InvalidDelta);
  CHECK_THROWS_AS(mnlqr::ConfidenceSpec(1.0, 3), mnlqr::InvalidDelta);
}

TEST_CASE("matrix hoeffding radius", "[concentration]") {
  CHECK(matrix_hoeffding_radius(Eigen::VectorXd::Zero(5), 3, 0.1) == 0.0);

  // 100 equal per-term bounds 1/sqrt(100): ||gamma|| = 1, so
  // beta = sqrt(2 ln(2*3/0.05)) = sqrt(2 ln 120).
  Eigen::VectorXd gammas = Eigen::VectorXd::Constant(100, 0.1);
  CHECK(matrix_hoeffding_radius(gammas, 3, 0.05) ==
        Catch::Approx(3.094347020869523).epsilon(1e-12));

  CHECK_THROWS_AS(matrix_hoeffding_radius(gammas, 3, 0.0), mnlqr::InvalidDelta);
  CHECK_THROWS_AS(matrix_hoeffding_radius(gammas, 3, 1.0), mnlqr::InvalidDelta);

  // Homogeneity and monotonicity in delta.
  CHECK(matrix_hoeffding_radius(2.0 * gammas, 3, 0.05) ==
        Catch::Approx(2.0 * matrix_hoeffding_radius(gammas, 3, 0.05))
            .epsilon(1e-14));
  CHECK(matrix_hoeffding_radius(gammas, 3, 0.01) >
        matrix_hoeffding_radius(gammas, 3, 0.05));
}

TEST_CASE("matrix hoeffding empirical coverage", "[concentration]") {
  // i.i.d. bounded zero-mean random symmetric matrices; the failure fraction
  // at delta = 0.1 stays below delta + 0.02 (the bound is conservative).
  mnlqr::Rng rng(61);
  const int repeats = 2000;
  const int n = 100;
  const int d = 3;
  const double delta = 0.1;
  Eigen::VectorXd gammas = Eigen::VectorXd::Constant(n, 1.0);
  const double beta = matrix_hoeffding_radius(gammas, d, delta);
  int failures = 0;
  for (int rep = 0; rep < repeats; ++rep) {
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < n; ++i) {
      // Random symmetric matrix scaled to spectral norm <= 1, sign-symmetric
      // so the mean is exactly zero.
      Eigen::MatrixXd m = mnlqr_test::random_symmetric(rng, d).mat();
      m /= SymMat(m, 1e-6).spectral_norm();
      if (rng.uniform() < 0.5) m = -m;
      sum += m;
    }
    if (SymMat(sum, 1e-6).spectral_norm() > beta) ++failures;
  }
  CHECK(static_cast<double>(failures) / repeats <= delta + 0.02);
}

TEST_CASE("vector hoeffding radius", "[concentration]") {
  CHECK(vector_hoeffding_radius(Eigen::VectorXd::Zero(4), 0.1) == 0.0);

  // ||gamma|| = 1 and delta = e^-2: radius = 2 + sqrt(4) = 4.
  Eigen::VectorXd one = Eigen::VectorXd::Constant(1, 1.0);
  CHECK(vector_hoeffding_radius(one, std::exp(-2.0)) ==
        Catch::Approx(4.0).epsilon(1e-13));

  CHECK_THROWS_AS(vector_hoeffding_radius(one, -0.5), mnlqr::InvalidDelta);
  CHECK(vector_hoeffding_radius(3.0 * one, 0.05) ==
        Catch::Approx(3.0 * vector_hoeffding_radius(one, 0.05)).epsilon(1e-14));
}

TEST_CASE("vector hoeffding empirical coverage", "[concentration]") {
  mnlqr::Rng rng(62);
  const int repeats = 2000;
  const int n = 50;
  const double delta = 0.1;
  Eigen::VectorXd gammas = Eigen::VectorXd::Constant(n, 1.0);
  const double radius = vector_hoeffding_radius(gammas, delta);
  int failures = 0;
  for (int rep = 0; rep < repeats; ++rep) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(3);
    for (int i = 0; i < n; ++i) sum += rng.ball(3, 1.0);  // zero-mean, norm <= 1
    if (sum.norm() > radius) ++failures;
  }
  CHECK(static_cast<double>(failures) / repeats <= delta + 0.02);
}

TEST_CASE("direct moment bound", "[concentration]") {
  // Constant samples: W_hat is the outer product.
  Eigen::VectorXd w(3);
  w << 0.1, -0.2, 0.05;
  std::vector<Eigen::VectorXd> constant(7, w);
  auto out = direct_moment_bound(constant, 0.35, 0.05);
  CHECK((out.w_hat.mat() - w * w.transpose()).cwiseAbs().maxCoeff() <= 1e-15);

  // Fixture: n_w = 3, delta = 0.05, N = 1e4, r_w = 0.35 gives
  // beta = 0.1225 * sqrt(2 ln(120) / 1e4).
  std::vector<Eigen::VectorXd> many(10000, Eigen::VectorXd::Zero(3));
  auto fixture = direct_moment_bound(many, 0.35, 0.05);
  CHECK(fixture.beta == Catch::Approx(3.790575100565165e-3).epsilon(1e-12));

  // Monotone in N, increasing as delta shrinks.
  std::vector<Eigen::VectorXd> fewer(2500, Eigen::VectorXd::Zero(3));
  CHECK(direct_moment_bound(fewer, 0.35, 0.05).beta > fixture.beta);
  CHECK(direct_moment_bound(many, 0.35, 0.01).beta > fixture.beta);

  // Norm violations are reported with the offending index.
  std::vector<Eigen::VectorXd> bad = constant;
  bad[3] = Eigen::Vector3d(1.0, 0, 0);
  try {
    direct_moment_bound(bad, 0.35, 0.05);
    FAIL("expected NormBoundViolated");
  } catch (const mnlqr::NormBoundViolated& e) {
    CHECK(e.index == 3);
  }
}

TEST_CASE("direct moment bound coverage on ball samples", "[concentration]") {
  // Disturbances uniform on a shifted ball; failure fraction below
  // delta + 0.02 over 500 repeats.
  mnlqr::Rng rng(63);
  mnlqr::DisturbanceSampler ball = mnlqr::DisturbanceSampler::uniform_ball(
      Eigen::Vector3d(0, 0, 0.1), 0.25);
  const SymMat w_star = ball.second_moment();
  const double delta = 0.1;
  const int repeats = 500;
  const int n = 400;
  int failures = 0;
  for (int rep = 0; rep < repeats; ++rep) {
    std::vector<Eigen::VectorXd> samples;
    samples.reserve(n);
    for (int i = 0; i < n; ++i) samples.push_back(ball.sample(rng));
    auto out = direct_moment_bound(samples, ball.norm_bound(), delta);
    if (SymMat(out.w_hat.mat() - w_star.mat(), 1e-6).spectral_norm() > out.beta) {
      ++failures;
    }
  }
  CHECK(static_cast<double>(failures) / repeats <= delta + 0.02);
}
