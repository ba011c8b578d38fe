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
#include <cstdio>
#include <vector>

#include "mnlqr/identify.hpp"
#include "mnlqr/simulate.hpp"
#include "test_util.hpp"

using mnlqr::Dataset;
using mnlqr::DisturbanceSampler;
using mnlqr::ModeTensor;
using mnlqr::Rng;
using mnlqr::SymMat;
using mnlqr_test::random_matrix;

namespace {

ModeTensor toy_truth() {
  Eigen::MatrixXd s1(2, 3), s2(2, 3), s3(2, 3);
  s1 << 1, 0, 0,
        0, 0, 0;
  s2 << 0, 1, 0,
        0, 0, 0;
  s3 << 0, 0, 0,
        0, 1, 1;
  return ModeTensor::from_slices({s1, s2, s3}, 2, 1);
}

DisturbanceSampler toy_disturbance() {
  return DisturbanceSampler::uniform_ball(Eigen::Vector3d(0, 0, 0.1), 0.25);
}

DisturbanceSampler unit_z(Eigen::Index nz) {
  return DisturbanceSampler::uniform_ball(Eigen::VectorXd::Zero(nz), 1.0);
}

Dataset toy_data(Eigen::Index n, std::uint64_t seed) {
  return mnlqr::gen_repeated_init(toy_truth(), toy_disturbance(), unit_z(3), n,
                                  Rng::stream(seed, 0), seed);
}

ModeTensor scalar_model() {
  return ModeTensor::from_slices({Eigen::MatrixXd::Ones(1, 1)}, 1, 0);
}

// Structured example: known deterministic mode plus three stochastic modes.
ModeTensor structured_truth() {
  Eigen::MatrixXd s1(2, 3), s2(2, 3), s3(2, 3), s4(2, 3);
  s1 << 1, 0.02, 0,
        0, 0.992, 0.02;
  s2 << 0, 0, 0,
        0, -0.03, 0;
  s3 << 0, -0.03, 0,
        0, 0, 0;
  s4 << 0, 0, 0,
        0, 0, 0.01;
  return ModeTensor::from_slices({s1, s2, s3, s4}, 2, 1, true);
}

}  // namespace

TEST_CASE("build regression", "[identify]") {
  // Scalar system: rows are z_i^2 and targets x_{i+1}^2.
  ModeTensor scalar = scalar_model();
  Dataset data;
  data.z = {Eigen::VectorXd::Constant(1, 2.0), Eigen::VectorXd::Constant(1, -1.5)};
  data.x_next = {Eigen::VectorXd::Constant(1, 1.0),
                 Eigen::VectorXd::Constant(1, 0.75)};
  auto [zn, yn] = mnlqr::build_regression(scalar, data);
  CHECK(zn(0, 0) == Catch::Approx(4.0).margin(1e-15));
  CHECK(zn(1, 0) == Catch::Approx(2.25).margin(1e-15));
  CHECK(yn[0] == Catch::Approx(1.0).margin(1e-15));
  CHECK(yn[1] == Catch::Approx(0.5625).margin(1e-15));

  // Noise-free scalar data with constant disturbance c: Y = c^2 Z.
  const double c = 0.3;
  Dataset noise_free;
  for (int i = 0; i < 5; ++i) {
    Eigen::VectorXd z = Eigen::VectorXd::Constant(1, 0.5 + i);
    noise_free.z.push_back(z);
    noise_free.x_next.push_back(c * z);
  }
  auto [zc, yc] = mnlqr::build_regression(scalar, noise_free);
  CHECK((yc - c * c * zc.col(0)).norm() <= 1e-14);

  // Blockwise assembly equals the stacked Kronecker form
  // Z_N = ([z1 (*) z1, ...]^T x I) W_(3)^T.
  ModeTensor truth = toy_truth();
  Dataset toy = toy_data(5, 81);
  auto [zn2, yn2] = mnlqr::build_regression(truth, toy);
  Eigen::MatrixXd stacked_z(5, mnlqr::sd(3));
  for (int i = 0; i < 5; ++i) {
    stacked_z.row(i) = mnlqr::svec_outer(toy.z[i]).transpose();
  }
  Eigen::MatrixXd w3 = matricize(truth.skron_tensor(), 3);
  Eigen::MatrixXd kron_form =
      mnlqr::kron(stacked_z, Eigen::MatrixXd::Identity(mnlqr::sd(2), mnlqr::sd(2))) *
      w3.transpose();
  CHECK((zn2 - kron_form).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("least squares second moment", "[identify]") {
  // Scalar case with constant disturbance: exact recovery of c^2.
  ModeTensor scalar = scalar_model();
  const double c = 0.4;
  Dataset data;
  Rng rng(82);
  for (int i = 0; i < 10; ++i) {
    Eigen::VectorXd z = Eigen::VectorXd::Constant(1, rng.uniform(0.5, 2.0));
    data.z.push_back(z);
    data.x_next.push_back(c * z);
  }
  SymMat w_hat = mnlqr::ls_second_moment(scalar, data);
  CHECK(w_hat(0, 0) == Catch::Approx(c * c).margin(1e-14));

  // The incremental normal equations match the stacked pseudo-inverse route.
  ModeTensor truth = toy_truth();
  Dataset toy = toy_data(40, 83);
  SymMat via_normal = mnlqr::ls_second_moment(truth, toy);
  auto [zn, yn] = mnlqr::build_regression(truth, toy);
  Eigen::VectorXd via_pinv = mnlqr::pinv(zn) * yn;
  CHECK((mnlqr::svec(via_normal) - via_pinv).norm() <=
        1e-9 * std::max(1.0, via_pinv.norm()));

  // Preconditions.
  Dataset tiny = toy_data(5, 84);
  CHECK_THROWS_AS(mnlqr::ls_second_moment(truth, tiny),
                  mnlqr::InsufficientSamples);
  Dataset degenerate = toy_data(8, 85);
  for (auto& z : degenerate.z) z = degenerate.z[0];
  CHECK_THROWS_AS(mnlqr::ls_second_moment(truth, degenerate),
                  mnlqr::RankDeficientData);
}

TEST_CASE("ls matches the direct estimator on recovered disturbances",
          "[identify]") {
  // Noise-observable system (n_x = n_w = 2) probed at a fixed z; identical z
  // across samples keeps the two estimators algebraically equal.
  Rng rng(86);
  Eigen::MatrixXd s1(2, 3), s2(2, 3);
  s1 << 0.5, 0.0, 1.0,
        0.1, 0.3, 0.0;
  s2 << 0.0, 0.2, 0.0,
        0.0, 0.1, 1.0;
  ModeTensor m = ModeTensor::from_slices({s1, s2}, 2, 1);
  DisturbanceSampler w_sampler =
      DisturbanceSampler::uniform_ball(Eigen::Vector2d(0.05, 0.0), 0.2);
  DisturbanceSampler z_point = DisturbanceSampler::uniform_ball(
      Eigen::Vector3d(0.8, -0.4, 0.6), 0.0);
  Dataset data =
      mnlqr::gen_repeated_init(m, w_sampler, z_point, 50, Rng::stream(86, 0), 86);

  CHECK(mnlqr::noise_observable(m, data.z[0], 16, rng));
  std::vector<Eigen::VectorXd> recovered = mnlqr::recover_disturbances(m, data);
  auto direct = mnlqr::direct_moment_bound(recovered, data.r_w, 0.1);

  // The rank check needs varied z, so estimate through the raw regression.
  auto [zn, yn] = mnlqr::build_regression(m, data);
  SymMat ls = mnlqr::unsvec(mnlqr::pinv(zn) * yn);
  CHECK((ls.mat() - direct.w_hat.mat()).norm() <=
        1e-8 * std::max(1.0, direct.w_hat.mat().norm()));
}

TEST_CASE("zeta_w", "[identify]") {
  // Single-sample scalar case: H_1 is the unit projector and zeta = 1.
  ModeTensor scalar = scalar_model();
  Dataset one;
  one.z = {Eigen::VectorXd::Constant(1, 0.7)};
  one.x_next = {Eigen::VectorXd::Constant(1, 0.2)};
  CHECK(mnlqr::zeta_w(scalar, one) == Catch::Approx(1.0).margin(1e-12));

  // sum_i H_i equals the projector onto img(W_(3)).
  ModeTensor truth = toy_truth();
  Dataset toy = toy_data(30, 87);
  Eigen::MatrixXd w3 = matricize(truth.skron_tensor(), 3);
  Eigen::MatrixXd projector = mnlqr::pinv(w3.transpose()) * w3.transpose();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(mnlqr::sd(3), mnlqr::sd(3));
  std::vector<Eigen::MatrixXd> blocks;
  for (const auto& z : toy.z) {
    Eigen::MatrixXd b = mnlqr::mode_vec_product(truth.skron_tensor(),
                                                mnlqr::svec_outer(z), 2);
    blocks.push_back(b.transpose() * b);
    gram += blocks.back();
  }
  Eigen::MatrixXd gram_pinv = mnlqr::pinv(gram);
  Eigen::MatrixXd h_sum = Eigen::MatrixXd::Zero(gram.rows(), gram.cols());
  for (const auto& b : blocks) h_sum += gram_pinv * b;
  CHECK((h_sum - projector).cwiseAbs().maxCoeff() <= 1e-9);

  // zeta decreases roughly as 1/sqrt(N).
  const double zeta_n = mnlqr::zeta_w(truth, toy_data(500, 88));
  const double zeta_4n = mnlqr::zeta_w(truth, toy_data(2000, 88));
  CHECK(zeta_4n / zeta_n >= 0.4);
  CHECK(zeta_4n / zeta_n <= 0.65);
}

TEST_CASE("second moment ambiguity", "[identify]") {
  // Radius formula at zeta = 0 and its delta monotonicity.
  CHECK(mnlqr::beta_w_radius(0.35, 0.0, 3, 0.05) == 0.0);
  CHECK(mnlqr::beta_w_radius(0.35, 0.2, 3, 0.01) >
        mnlqr::beta_w_radius(0.35, 0.2, 3, 0.05));
  CHECK_THROWS_AS(mnlqr::beta_w_radius(0.35, 0.2, 3, 1.5), mnlqr::InvalidDelta);

  ModeTensor truth = toy_truth();
  Dataset toy = toy_data(200, 89);
  mnlqr::AmbiguitySet amb = mnlqr::second_moment_ambiguity(truth, toy, 0.05);
  CHECK(amb.certified);
  CHECK(amb.beta_w ==
        Catch::Approx(mnlqr::beta_w_radius(toy.r_w, mnlqr::zeta_w(truth, toy), 3,
                                           0.05))
            .epsilon(1e-12));

  // beta_w depends only on the z data, not the realized noise.
  Dataset renoised = toy;
  Rng rng(90);
  DisturbanceSampler ball = toy_disturbance();
  for (Eigen::Index i = 0; i < renoised.size(); ++i) {
    renoised.x_next[i] = mnlqr::step(truth, renoised.z[i], ball.sample(rng));
  }
  CHECK(mnlqr::second_moment_ambiguity(truth, renoised, 0.05).beta_w ==
        Catch::Approx(amb.beta_w).epsilon(1e-12));
}

TEST_CASE("operator interval coverage", "[identify]") {
  // Over repeats, E(W_bar; Z) dominates the true E(Z) on random psd Z with
  // frequency at least 1 - delta - 0.03.
  ModeTensor truth = toy_truth();
  DisturbanceSampler ball = toy_disturbance();
  const SymMat w_star = ball.second_moment();
  const double delta = 0.1;
  const int repeats = 300;
  Rng zrng(91);
  int failures = 0;
  for (int rep = 0; rep < repeats; ++rep) {
    Dataset data = toy_data(150, 1000 + rep);
    mnlqr::AmbiguitySet amb = mnlqr::second_moment_ambiguity(truth, data, delta);
    SymMat w_bar(amb.w_hat.mat() +
                 amb.beta_w * Eigen::MatrixXd::Identity(3, 3));
    Eigen::MatrixXd gap = mnlqr::moment_dynamics(truth, w_bar).matrix() -
                          mnlqr::moment_dynamics(truth, w_star).matrix();
    bool dominated = true;
    for (int probe = 0; probe < 50 && dominated; ++probe) {
      Eigen::VectorXd z = zrng.ball(3, 1.0);
      Eigen::MatrixXd diff =
          mnlqr::unsvec(gap * mnlqr::svec_outer(z)).mat();
      if (SymMat(diff, 1e-6).min_eigenvalue() < -1e-9) dominated = false;
    }
    if (!dominated) ++failures;
  }
  CHECK(static_cast<double>(failures) / repeats <= delta + 0.03);
}

TEST_CASE("predicted zeta bound", "[identify]") {
  ModeTensor truth = toy_truth();

  // Empirical kurtosis of the unit-ball z distribution.
  Rng rng(92);
  const int kurt_samples = 50000;
  Eigen::MatrixXd kurt = Eigen::MatrixXd::Zero(mnlqr::sd(3), mnlqr::sd(3));
  for (int i = 0; i < kurt_samples; ++i) {
    Eigen::VectorXd zz = mnlqr::svec_outer(rng.ball(3, 1.0));
    kurt += zz * zz.transpose();
  }
  kurt /= kurt_samples;
  SymMat kurtosis(kurt, 1e-6);

  // The admissible N threshold for this system sits near 4.7e4.
  const Eigen::Index n = 50000;
  const double bound = mnlqr::predicted_zeta_w(truth, kurtosis, n, 0.1);
  CHECK(bound > 0.0);
  CHECK(std::isfinite(bound));

  // The bound holds for most realized datasets.
  const int repeats = 20;
  int covered = 0;
  for (int rep = 0; rep < repeats; ++rep) {
    if (mnlqr::zeta_w(truth, toy_data(n, 2000 + rep)) <= bound) ++covered;
  }
  CHECK(static_cast<double>(covered) / repeats >= 1.0 - 0.1 - 0.03);

  // Scale invariance: the kurtosis input is normalized by r_z^4, so scaling z
  // leaves the bound unchanged.
  CHECK(mnlqr::predicted_zeta_w(truth, kurtosis, n, 0.1) ==
        Catch::Approx(bound).epsilon(1e-14));

  CHECK_THROWS_AS(mnlqr::predicted_zeta_w(truth, kurtosis, 2, 0.1),
                  mnlqr::SampleCountBelowThreshold);
}

TEST_CASE("noise observability", "[identify]") {
  Rng rng(93);

  // Single mode: generically observable.
  Eigen::MatrixXd s(2, 3);
  s << 1, 0, 0,
       0, 1, 0.5;
  ModeTensor single = ModeTensor::from_slices({s}, 2, 1);
  CHECK(mnlqr::noise_observable(single, rng.ball(3, 1.0), 16, rng));

  // Model-free basis has n_w > n_x.
  ModeTensor mf = ModeTensor::model_free(2, 1);
  CHECK_FALSE(mnlqr::noise_observable(mf, rng.ball(3, 1.0), 4, rng));

  // Modes sharing a left null space are never observable.
  Eigen::MatrixXd r1(2, 3), r2(2, 3);
  r1 << 1, 2, 3,
        0, 0, 0;
  r2 << 0, 1, -1,
        0, 0, 0;
  ModeTensor deficient = ModeTensor::from_slices({r1, r2}, 2, 1);
  CHECK_FALSE(mnlqr::noise_observable(deficient, rng.ball(3, 1.0), 16, rng));
}

TEST_CASE("disturbance recovery", "[identify]") {
  Rng rng(94);
  Eigen::MatrixXd s1(2, 3), s2(2, 3);
  s1 << 0.5, 0.0, 1.0,
        0.1, 0.3, 0.0;
  s2 << 0.0, 0.2, 0.0,
        0.0, 0.1, 1.0;
  ModeTensor m = ModeTensor::from_slices({s1, s2}, 2, 1);

  // Round trip through step().
  Dataset data;
  std::vector<Eigen::VectorXd> w_true;
  for (int i = 0; i < 20; ++i) {
    Eigen::VectorXd z = rng.ball(3, 1.0);
    Eigen::VectorXd w = rng.ball(2, 0.25);
    data.z.push_back(z);
    data.x_next.push_back(mnlqr::step(m, z, w));
    w_true.push_back(w);
  }
  std::vector<Eigen::VectorXd> recovered = mnlqr::recover_disturbances(m, data);
  for (int i = 0; i < 20; ++i) {
    CHECK((recovered[i] - w_true[i]).norm() <= 1e-10);
  }

  // Zero state with nonzero successor cannot come from the model.
  Dataset bad;
  bad.z = {Eigen::VectorXd::Zero(3)};
  bad.x_next = {Eigen::Vector2d(1.0, 0.0)};
  CHECK_THROWS_AS(mnlqr::recover_disturbances(m, bad),
                  mnlqr::InconsistentMeasurement);
}

TEST_CASE("mean identification", "[identify]") {
  ModeTensor truth = structured_truth();
  Rng rng(95);

  // Constant stochastic part: exact mean recovery.
  Eigen::VectorXd mu(3);
  mu << 0.01, -0.02, 0.005;
  Dataset data;
  DisturbanceSampler z_sampler = unit_z(3);
  for (int i = 0; i < 40; ++i) {
    Eigen::VectorXd z = z_sampler.sample(rng);
    Eigen::VectorXd w(4);
    w << 1.0, mu;
    data.z.push_back(z);
    data.x_next.push_back(mnlqr::step(truth, z, w));
  }
  data.r_w = 0.05;
  CHECK((mnlqr::ls_mean(truth, data) - mu).norm() <= 1e-12);

  ModeTensor plain = toy_truth();
  CHECK_THROWS_AS(mnlqr::ls_mean(plain, data), mnlqr::NotStructured);

  // Coverage of beta_mu over repeats (ball disturbance, true mean zero).
  DisturbanceSampler w_sampler =
      DisturbanceSampler::uniform_ball(Eigen::VectorXd::Zero(3), 0.05);
  const double delta = 0.1;
  const int repeats = 200;
  int failures = 0;
  for (int rep = 0; rep < repeats; ++rep) {
    Dataset d = mnlqr::gen_repeated_init(truth, w_sampler, z_sampler, 300,
                                         Rng::stream(3000 + rep, 0), rep);
    auto mean = mnlqr::mean_ambiguity(truth, d, delta);
    if (mean.mu_hat.norm() > mean.beta_mu) ++failures;
  }
  CHECK(static_cast<double>(failures) / repeats <= delta + 0.02);
}

TEST_CASE("structured ambiguity", "[identify]") {
  // beta_sigma collapses to beta_w when beta_mu = 0.
  CHECK(mnlqr::beta_sigma_radius(0.3, 0.0, 2.0) == Catch::Approx(0.3));

  ModeTensor truth = structured_truth();
  DisturbanceSampler w_sampler =
      DisturbanceSampler::uniform_ball(Eigen::VectorXd::Zero(3), 0.05);
  DisturbanceSampler z_sampler = unit_z(3);
  Dataset data = mnlqr::gen_repeated_init(truth, w_sampler, z_sampler, 500,
                                          Rng::stream(96, 0), 96);
  mnlqr::AmbiguitySet amb = mnlqr::structured_ambiguity(truth, data, 0.05, 0.05);
  REQUIRE(amb.structured.has_value());
  CHECK(amb.delta == Catch::Approx(0.1));

  // The single-delta overload splits the budget evenly.
  mnlqr::AmbiguitySet split = mnlqr::structured_ambiguity(truth, data, 0.1);
  CHECK(split.beta_w == Catch::Approx(amb.beta_w).epsilon(1e-14));
  CHECK(split.structured->beta_mu ==
        Catch::Approx(amb.structured->beta_mu).epsilon(1e-14));
  CHECK(amb.structured->beta_sigma ==
        Catch::Approx(amb.beta_w +
                      amb.structured->beta_mu *
                          (amb.structured->beta_mu +
                           2.0 * amb.structured->mu_hat.norm()))
            .epsilon(1e-12));
  CHECK((amb.structured->sigma_hat.mat() -
         (amb.w_hat.mat() -
          amb.structured->mu_hat * amb.structured->mu_hat.transpose()))
            .norm() <= 1e-13);

  // Triangle audit: || Sigma* - Sigma_hat || <= beta_sigma holds with
  // frequency >= 1 - delta_mu - delta_w - 0.03.
  const SymMat sigma_star = w_sampler.covariance();
  const int repeats = 100;
  int failures = 0;
  for (int rep = 0; rep < repeats; ++rep) {
    Dataset d = mnlqr::gen_repeated_init(truth, w_sampler, z_sampler, 300,
                                         Rng::stream(4000 + rep, 0), rep);
    mnlqr::AmbiguitySet a = mnlqr::structured_ambiguity(truth, d, 0.05, 0.05);
    const double err =
        SymMat(a.structured->sigma_hat.mat() - sigma_star.mat(), 1e-6)
            .spectral_norm();
    if (err > a.structured->beta_sigma) ++failures;
  }
  CHECK(static_cast<double>(failures) / repeats <= 0.05 + 0.05 + 0.03);
}

TEST_CASE("bias stays in the dynamics kernel", "[identify]") {
  // The model-free basis overparameterizes the dynamics, so the parameter is
  // only identifiable up to the kernel of the moment map. Take a "true" W
  // with a nonzero kernel component: noise-free least squares recovers a
  // different parameter, yet the induced operator is exact.
  ModeTensor truth = toy_truth();
  ModeTensor mf = ModeTensor::model_free(2, 1);
  Rng rng(97);
  DisturbanceSampler ball = toy_disturbance();

  const SymMat w_star_v = ball.second_moment();
  const SymMat w_min = mnlqr::translate_second_moment(mf, truth, w_star_v);
  Eigen::MatrixXd w3 = matricize(mf.skron_tensor(), 3);
  Eigen::MatrixXd projector = Eigen::MatrixXd::Identity(w3.rows(), w3.rows()) -
                              mnlqr::pinv(w3.transpose()) * w3.transpose();
  Eigen::VectorXd kernel_part =
      projector * mnlqr::svec(mnlqr_test::random_symmetric(rng, 6));
  REQUIRE(kernel_part.norm() > 1e-6);
  const SymMat w_true(w_min.mat() + mnlqr::unsvec(kernel_part).mat());
  mnlqr::CpOperator e_star = mnlqr::moment_dynamics(mf, w_true);

  // Noise-free targets svec(E(w_true; z z^T)) fed to the estimator.
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(mnlqr::sd(6), mnlqr::sd(6));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(mnlqr::sd(6));
  for (int i = 0; i < 60; ++i) {
    Eigen::VectorXd zz = mnlqr::svec_outer(rng.ball(3, 1.0));
    Eigen::MatrixXd b = mnlqr::mode_vec_product(mf.skron_tensor(), zz, 2);
    gram += b.transpose() * b;
    rhs += b.transpose() * (e_star.matrix() * zz);
  }
  SymMat w_hat = mnlqr::unsvec(mnlqr::pinv(gram) * rhs);
  // The estimate is biased relative to the generating parameter...
  CHECK((w_hat.mat() - w_true.mat()).norm() > 1e-6);
  // ...but the induced operator is exact, because the gap is pure kernel.
  CHECK((mnlqr::moment_dynamics(mf, w_hat).matrix() - e_star.matrix())
            .cwiseAbs()
            .maxCoeff() <= 1e-9);
}

TEST_CASE("single trajectory radii are uncertified", "[identify]") {
  ModeTensor truth = toy_truth();
  Eigen::VectorXd x0(2);
  x0 << 1, 1;
  Eigen::MatrixXd k_exc(1, 2);
  k_exc << -0.5, -0.2;
  Dataset data = mnlqr::gen_single_trajectory(truth, toy_disturbance(), x0,
                                              k_exc, 1.0, 200,
                                              Rng::stream(98, 0), 98);
  mnlqr::AmbiguitySet amb = mnlqr::second_moment_ambiguity(truth, data, 0.05);
  CHECK_FALSE(amb.certified);
}

TEST_CASE("dataset csv round trip", "[identify]") {
  Dataset data = toy_data(12, 99);
  const std::string path = "test_dataset_roundtrip.csv";
  mnlqr::save_dataset(data, path);
  Dataset back = mnlqr::load_dataset(path);
  REQUIRE(back.size() == data.size());
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    CHECK((back.z[i] - data.z[i]).norm() == 0.0);
    CHECK((back.x_next[i] - data.x_next[i]).norm() == 0.0);
  }
  CHECK(back.r_w == data.r_w);
  CHECK(back.generation == data.generation);
  CHECK(back.seed == data.seed);
  std::remove(path.c_str());
  std::remove(mnlqr::dataset_sidecar_path(path).c_str());
}
