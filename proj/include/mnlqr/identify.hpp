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

#ifndef MNLQR_IDENTIFY_HPP_
#define MNLQR_IDENTIFY_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mnlqr/concentration.hpp"
#include "mnlqr/errors.hpp"
#include "mnlqr/model.hpp"
#include "mnlqr/rng.hpp"
#include "mnlqr/symm.hpp"
#include "mnlqr/tensor.hpp"

namespace mnlqr {

enum class Generation { kRepeatedInit, kRollout, kSingleTrajectory };

inline std::string to_string(Generation g) {
  switch (g) {
    case Generation::kRepeatedInit: return "repeated_init";
    case Generation::kRollout: return "rollout";
    default: return "single_trajectory";
  }
}

inline Generation generation_from_string(const std::string& s) {
  if (s == "repeated_init") return Generation::kRepeatedInit;
  if (s == "rollout") return Generation::kRollout;
  if (s == "single_trajectory") return Generation::kSingleTrajectory;
  throw Error("unknown generation method '" + s + "'");
}

// State-transition data (z_i, x_{i+1}) plus the metadata the estimators need:
// the disturbance norm bound r_w, optionally a bound on ||z||, how the data
// was generated, and the seed that produced it.
struct Dataset {
  std::vector<Eigen::VectorXd> z;
  std::vector<Eigen::VectorXd> x_next;
  double r_w = 0.0;
  std::optional<double> r_z;
  Generation generation = Generation::kRepeatedInit;
  std::optional<int> rollout_length;
  std::uint64_t seed = 0;

  Eigen::Index size() const { return static_cast<Eigen::Index>(z.size()); }
  Eigen::Index nz() const { return z.empty() ? 0 : z[0].size(); }
  Eigen::Index nx() const { return x_next.empty() ? 0 : x_next[0].size(); }
};

// Data-driven ambiguity set: estimate w_hat with spectral-norm radius beta_w
// at confidence 1 - delta. Radii from single-trajectory data carry no
// finite-sample guarantee and are marked uncertified. The structured variant
// adds the mean estimate and the derived covariance radius.
struct AmbiguitySet {
  SymMat w_hat;
  double beta_w = 0.0;
  double delta = 0.0;
  bool certified = true;

  struct Structured {
    Eigen::VectorXd mu_hat;
    SymMat sigma_hat;
    double beta_mu = 0.0;
    double beta_sigma = 0.0;
  };
  std::optional<Structured> structured;
};

namespace detail {

// Regression block for one sample: (M (*) M) xbar_2 (z (*) z), the matrix
// mapping svec(W) to the predicted svec(x x^T).
inline Eigen::MatrixXd regression_block(const ModeTensor& m,
                                        const Eigen::VectorXd& z) {
  return mode_vec_product(m.skron_tensor(), svec_outer(z), 2);
}

inline void check_identifiable(const ModeTensor& m, const Dataset& data) {
  if (data.size() < 1 || data.nz() != m.nz() || data.nx() != m.nx()) {
    throw DimensionMismatch("dataset does not match the mode tensor");
  }
  if (data.size() < sd(m.nz())) {
    throw InsufficientSamples("need at least sd(n_z) = " +
                              std::to_string(sd(m.nz())) + " samples, got " +
                              std::to_string(data.size()));
  }
}

// Rank check on the stacked [z_i (*) z_i]; the almost-sure rank condition can
// fail on finite-precision data, in which case the estimate is not defined.
// The check runs on the stack itself (not its Gram matrix, which would square
// the conditioning and tighten the cutoff to sqrt(rel_tol)).
inline void check_excitation(const ModeTensor& m, const Dataset& data,
                             double rel_tol = 1e-10) {
  const Eigen::Index d = sd(m.nz());
  Eigen::MatrixXd stack(data.size(), d);
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    stack.row(i) = svec_outer(data.z[i]).transpose();
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(stack);
  qr.setThreshold(rel_tol);
  if (qr.rank() < d) {
    throw RankDeficientData("stacked z (*) z has numerical rank " +
                            std::to_string(qr.rank()) + " < sd(n_z) = " +
                            std::to_string(d));
  }
}

struct NormalEquations {
  Eigen::MatrixXd gram;   // sum_i B_i^T B_i = sum_i Wop(z_i z_i^T)
  Eigen::VectorXd rhs;    // sum_i B_i^T svec(x x^T)
  Eigen::MatrixXd pinv_gram;
};

// The normal equations are accumulated sample by sample, so memory stays
// independent of N.
inline NormalEquations accumulate_normal_equations(const ModeTensor& m,
                                                   const Dataset& data) {
  const Eigen::Index dw = sd(m.nw());
  NormalEquations ne;
  ne.gram = Eigen::MatrixXd::Zero(dw, dw);
  ne.rhs = Eigen::VectorXd::Zero(dw);
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const Eigen::MatrixXd b = regression_block(m, data.z[i]);
    ne.gram.noalias() += b.transpose() * b;
    ne.rhs.noalias() += b.transpose() * svec_outer(data.x_next[i]);
  }
  ne.pinv_gram = pinv(ne.gram);
  return ne;
}

}  // namespace detail

// Stacked regression system: block i of Z_N is (M (*) M) xbar_2 (z_i (*) z_i)
// and block i of Y_N is x_{i+1} (*) x_{i+1}, so Y_N = Z_N svec(W) + noise.
inline std::pair<Eigen::MatrixXd, Eigen::VectorXd> build_regression(
    const ModeTensor& m, const Dataset& data) {
  if (data.size() < 1 || data.nz() != m.nz() || data.nx() != m.nx()) {
    throw DimensionMismatch("dataset does not match the mode tensor");
  }
  const Eigen::Index dx = sd(m.nx());
  Eigen::MatrixXd zn(data.size() * dx, sd(m.nw()));
  Eigen::VectorXd yn(data.size() * dx);
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    zn.middleRows(i * dx, dx) = detail::regression_block(m, data.z[i]);
    yn.segment(i * dx, dx) = svec_outer(data.x_next[i]);
  }
  return {std::move(zn), std::move(yn)};
}

// Least-squares estimate svec(W_hat) = pinv(Z_N) Y_N, evaluated through the
// incrementally accumulated normal equations. The estimate may be biased and
// indefinite; the induced moment dynamics are what the bias-free guarantee
// applies to, so no psd projection happens here.
inline SymMat ls_second_moment(const ModeTensor& m, const Dataset& data) {
  detail::check_identifiable(m, data);
  detail::check_excitation(m, data);
  const detail::NormalEquations ne = detail::accumulate_normal_equations(m, data);
  return unsvec(ne.pinv_gram * ne.rhs);
}

// zeta_W^2 = sum_i (sqrt(n_w) ||H_i||_2)^2 with
//   H_i = pinv(sum_j Wop(z_j z_j^T)) Wop(z_i z_i^T),
// the computable bound on the operator norms entering the error bound. It
// depends only on the z data, not on the realized noise.
inline double zeta_w(const ModeTensor& m, const Dataset& data) {
  detail::check_identifiable(m, data);
  detail::check_excitation(m, data);
  const detail::NormalEquations ne = detail::accumulate_normal_equations(m, data);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const Eigen::MatrixXd b = detail::regression_block(m, data.z[i]);
    const Eigen::MatrixXd h = ne.pinv_gram * (b.transpose() * b);
    const double norm = spectral_norm(h);
    acc += norm * norm;
  }
  return std::sqrt(static_cast<double>(m.nw()) * acc);
}

// beta_W = r_w^2 zeta_W sqrt(2 log(2 n_w / delta)).
inline double beta_w_radius(double r_w, double zeta, Eigen::Index nw,
                            double delta) {
  check_delta(delta);
  return r_w * r_w * zeta *
         std::sqrt(2.0 * std::log(2.0 * static_cast<double>(nw) / delta));
}

// Second-moment ambiguity set: with probability at least 1 - delta the true
// moment dynamics are bracketed by E(w_hat - beta_w I; .) and
// E(w_hat + beta_w I; .) on psd arguments.
inline AmbiguitySet second_moment_ambiguity(const ModeTensor& m,
                                            const Dataset& data, double delta) {
  check_delta(delta);
  if (data.r_w <= 0.0) {
    throw Error("dataset carries no disturbance norm bound r_w");
  }
  detail::check_identifiable(m, data);
  detail::check_excitation(m, data);
  const detail::NormalEquations ne = detail::accumulate_normal_equations(m, data);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const Eigen::MatrixXd b = detail::regression_block(m, data.z[i]);
    const Eigen::MatrixXd h = ne.pinv_gram * (b.transpose() * b);
    const double norm = spectral_norm(h);
    acc += norm * norm;
  }
  const double zeta = std::sqrt(static_cast<double>(m.nw()) * acc);
  AmbiguitySet amb;
  amb.w_hat = unsvec(ne.pinv_gram * ne.rhs);
  amb.beta_w = beta_w_radius(data.r_w, zeta, m.nw(), delta);
  amb.delta = delta;
  amb.certified = data.generation != Generation::kSingleTrajectory;
  return amb;
}

// A-priori bound on zeta_W from the kurtosis of z,
//   zeta_W <= ||W||_2^2 / (sqrt(N) gamma_W - ||W||_2^2 tau_W),
// where gamma_W is the d_W-th eigenvalue of W_(3) (kurtosis x I) W_(3)^T,
// d_W = rank(W_(3)) and tau_W = sqrt(2 ln(2 d_W / delta)). The tensor
// spectral norm is replaced by its tightest flattening upper bound
// min_n ||W_(n)||_2, which keeps the bound valid.
inline double predicted_zeta_w(const ModeTensor& m, const SymMat& kurtosis,
                               Eigen::Index n, double delta) {
  check_delta(delta);
  if (kurtosis.dim() != sd(m.nz())) {
    throw DimensionMismatch("kurtosis must be sd(n_z) x sd(n_z)");
  }
  if (!kurtosis.is_psd(1e-9)) {
    throw NotPsd("kurtosis must be psd", kurtosis.min_eigenvalue());
  }
  const Tensor3& wt = m.skron_tensor();
  const Eigen::MatrixXd w3 = matricize(wt, 3);
  const Eigen::Index dw = numerical_rank(w3);
  const double tau = std::sqrt(2.0 * std::log(2.0 * static_cast<double>(dw) / delta));
  const Eigen::MatrixXd inner =
      w3 *
      kron(kurtosis.mat(), Eigen::MatrixXd::Identity(sd(m.nx()), sd(m.nx()))) *
      w3.transpose();
  Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                           inner, Eigen::EigenvaluesOnly)
                           .eigenvalues();
  // d_W-th largest eigenvalue (ev is ascending).
  const double gamma = ev[ev.size() - dw];
  double wnorm = std::min({spectral_norm(matricize(wt, 1)),
                           spectral_norm(matricize(wt, 2)),
                           spectral_norm(w3)});
  const double wsq = wnorm * wnorm;
  const double threshold = (wsq * tau / gamma) * (wsq * tau / gamma);
  if (static_cast<double>(n) < threshold) {
    throw SampleCountBelowThreshold(
        "bound needs N >= " + std::to_string(threshold) + ", got " +
        std::to_string(n));
  }
  return wsq / (std::sqrt(static_cast<double>(n)) * gamma - wsq * tau);
}

// Randomized left-invertibility check of M xbar_2 z: the property holds with
// probability zero or one over nondegenerate z, so random probes decide it.
inline bool noise_observable(const ModeTensor& m, const Eigen::VectorXd& z_probe,
                             int reps, Rng& rng) {
  if (z_probe.size() != m.nz()) {
    throw DimensionMismatch("probe must have length n_z");
  }
  if (m.nx() < m.nw()) return false;
  std::vector<Eigen::VectorXd> probes;
  probes.push_back(z_probe);
  for (int r = 0; r < reps; ++r) probes.push_back(rng.ball(m.nz(), 1.0));
  for (const Eigen::VectorXd& z : probes) {
    if (numerical_rank(mode_vec_product(m.tensor(), z, 2)) < m.nw()) {
      return false;
    }
  }
  return true;
}

// Exact disturbance recovery w_i = pinv(M xbar_2 z_i) x_{i+1} for noise
// observable systems.
inline std::vector<Eigen::VectorXd> recover_disturbances(const ModeTensor& m,
                                                         const Dataset& data) {
  if (data.nz() != m.nz() || data.nx() != m.nx()) {
    throw DimensionMismatch("dataset does not match the mode tensor");
  }
  std::vector<Eigen::VectorXd> out;
  out.reserve(data.z.size());
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const Eigen::MatrixXd f = mode_vec_product(m.tensor(), data.z[i], 2);
    const Eigen::VectorXd w = pinv(f) * data.x_next[i];
    const double residual = (f * w - data.x_next[i]).norm();
    if (residual > 1e-8 * std::max(1e-12, data.x_next[i].norm())) {
      throw InconsistentMeasurement(static_cast<std::size_t>(i));
    }
    if (numerical_rank(f) < m.nw()) {
      throw NotObservable(static_cast<std::size_t>(i));
    }
    out.push_back(w);
  }
  return out;
}

namespace detail {

// Shifted measurements y_{i+1} = x_{i+1} - [A_1, B_1] z_i of the structured
// model, which follow the unstructured measurement model with the truncated
// tensor.
inline Dataset shift_structured(const ModeTensor& m, const Dataset& data) {
  const Eigen::MatrixXd det = m.deterministic_slice();
  Dataset shifted = data;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    shifted.x_next[i] = data.x_next[i] - det * data.z[i];
  }
  return shifted;
}

struct MeanNormalEquations {
  Eigen::MatrixXd gram;
  Eigen::VectorXd rhs;
  Eigen::MatrixXd pinv_gram;
};

inline MeanNormalEquations accumulate_mean_equations(const ModeTensor& mt,
                                                     const Dataset& shifted) {
  MeanNormalEquations ne;
  ne.gram = Eigen::MatrixXd::Zero(mt.nw(), mt.nw());
  ne.rhs = Eigen::VectorXd::Zero(mt.nw());
  for (Eigen::Index i = 0; i < shifted.size(); ++i) {
    const Eigen::MatrixXd c = mode_vec_product(mt.tensor(), shifted.z[i], 2);
    ne.gram.noalias() += c.transpose() * c;
    ne.rhs.noalias() += c.transpose() * shifted.x_next[i];
  }
  ne.pinv_gram = pinv(ne.gram);
  return ne;
}

}  // namespace detail

// Least-squares mean of the stochastic disturbance part of a structured
// model, mu_hat = pinv(Z_N^mu) Y_N^mu.
inline Eigen::VectorXd ls_mean(const ModeTensor& m, const Dataset& data) {
  if (!m.structured()) {
    throw NotStructured("ls_mean requires a structured mode tensor");
  }
  if (data.nz() != m.nz() || data.nx() != m.nx()) {
    throw DimensionMismatch("dataset does not match the mode tensor");
  }
  if (data.size() < m.nz()) {
    throw InsufficientSamples("mean estimation needs at least n_z samples");
  }
  const ModeTensor mt = m.truncated();
  const Dataset shifted = detail::shift_structured(m, data);
  const detail::MeanNormalEquations ne =
      detail::accumulate_mean_equations(mt, shifted);
  return ne.pinv_gram * ne.rhs;
}

struct MeanAmbiguity {
  Eigen::VectorXd mu_hat;
  double beta_mu = 0.0;
  double zeta_mu = 0.0;
};

// Mean estimate with radius beta_mu = r_w zeta_mu (2 + sqrt(2 ln(1/delta))),
// zeta_mu^2 = sum_i ||G_i||_2^2.
inline MeanAmbiguity mean_ambiguity(const ModeTensor& m, const Dataset& data,
                                    double delta) {
  check_delta(delta);
  if (!m.structured()) {
    throw NotStructured("mean_ambiguity requires a structured mode tensor");
  }
  if (data.r_w <= 0.0) {
    throw Error("dataset carries no disturbance norm bound r_w");
  }
  if (data.size() < m.nz()) {
    throw InsufficientSamples("mean estimation needs at least n_z samples");
  }
  const ModeTensor mt = m.truncated();
  const Dataset shifted = detail::shift_structured(m, data);
  const detail::MeanNormalEquations ne =
      detail::accumulate_mean_equations(mt, shifted);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < shifted.size(); ++i) {
    const Eigen::MatrixXd c = mode_vec_product(mt.tensor(), shifted.z[i], 2);
    const double norm = spectral_norm(ne.pinv_gram * (c.transpose() * c));
    acc += norm * norm;
  }
  MeanAmbiguity out;
  out.mu_hat = ne.pinv_gram * ne.rhs;
  out.zeta_mu = std::sqrt(acc);
  out.beta_mu =
      data.r_w * out.zeta_mu * (2.0 + std::sqrt(2.0 * std::log(1.0 / delta)));
  return out;
}

inline double beta_sigma_radius(double beta_w, double beta_mu, double mu_norm) {
  return beta_w + beta_mu * (beta_mu + 2.0 * mu_norm);
}

// Structured ambiguity set combining the mean and second-moment estimates:
// Sigma_hat = W~_hat - mu_hat mu_hat^T with radius
// beta_Sigma = beta_W + beta_mu (beta_mu + 2 ||mu_hat||), valid at combined
// confidence 1 - delta_mu - delta_w.
inline AmbiguitySet structured_ambiguity(const ModeTensor& m, const Dataset& data,
                                         double delta_mu, double delta_w) {
  check_delta(delta_mu);
  check_delta(delta_w);
  if (!m.structured()) {
    throw NotStructured("structured_ambiguity requires a structured mode tensor");
  }
  const ModeTensor mt = m.truncated();
  const Dataset shifted = detail::shift_structured(m, data);
  AmbiguitySet base = second_moment_ambiguity(mt, shifted, delta_w);
  const MeanAmbiguity mean = mean_ambiguity(m, data, delta_mu);

  AmbiguitySet out;
  out.w_hat = base.w_hat;
  out.beta_w = base.beta_w;
  out.delta = delta_mu + delta_w;
  out.certified = base.certified;
  AmbiguitySet::Structured s;
  s.mu_hat = mean.mu_hat;
  s.sigma_hat =
      SymMat(base.w_hat.mat() - mean.mu_hat * mean.mu_hat.transpose(), 1e-9);
  s.beta_mu = mean.beta_mu;
  s.beta_sigma = beta_sigma_radius(base.beta_w, mean.beta_mu, mean.mu_hat.norm());
  out.structured = std::move(s);
  return out;
}

// Single-confidence variant: the budget splits evenly, delta_mu = delta_w
// = delta / 2.
inline AmbiguitySet structured_ambiguity(const ModeTensor& m, const Dataset& data,
                                         double delta) {
  check_delta(delta);
  return structured_ambiguity(m, data, delta / 2.0, delta / 2.0);
}

// --- Dataset serialization -------------------------------------------------
//
// CSV with header  i,z_0..z_{nz-1},xnext_0..xnext_{nx-1}  plus a JSON sidecar
// (same path with ".meta.json" appended) for r_w, generation and seed.

inline std::string dataset_sidecar_path(const std::string& csv_path) {
  return csv_path + ".meta.json";
}

inline void save_dataset(const Dataset& data, const std::string& csv_path) {
  std::ofstream csv(csv_path);
  if (!csv) throw Error("cannot open " + csv_path + " for writing");
  csv << "i";
  for (Eigen::Index j = 0; j < data.nz(); ++j) csv << ",z_" << j;
  for (Eigen::Index j = 0; j < data.nx(); ++j) csv << ",xnext_" << j;
  csv << "\n";
  char buf[32];
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    csv << i;
    for (Eigen::Index j = 0; j < data.nz(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", data.z[i][j]);
      csv << ',' << buf;
    }
    for (Eigen::Index j = 0; j < data.nx(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", data.x_next[i][j]);
      csv << ',' << buf;
    }
    csv << "\n";
  }
  nlohmann::json meta{{"r_w", data.r_w},
                      {"generation", to_string(data.generation)},
                      {"seed", data.seed}};
  if (data.r_z) meta["r_z"] = *data.r_z;
  if (data.rollout_length) meta["rollout_length"] = *data.rollout_length;
  std::ofstream side(dataset_sidecar_path(csv_path));
  if (!side) {
    throw Error("cannot open " + dataset_sidecar_path(csv_path) +
                " for writing");
  }
  side << meta.dump(2) << "\n";
}

inline Dataset load_dataset(const std::string& csv_path) {
  std::ifstream csv(csv_path);
  if (!csv) throw Error("cannot open " + csv_path);
  std::string header;
  if (!std::getline(csv, header)) throw Error("empty dataset file " + csv_path);
  Eigen::Index nz = 0, nx = 0;
  {
    std::stringstream ss(header);
    std::string col;
    while (std::getline(ss, col, ',')) {
      if (col.rfind("z_", 0) == 0) ++nz;
      if (col.rfind("xnext_", 0) == 0) ++nx;
    }
  }
  if (nz == 0 || nx == 0) throw Error("malformed dataset header in " + csv_path);
  Dataset data;
  std::string line;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');  // index column
    Eigen::VectorXd z(nz), x(nx);
    for (Eigen::Index j = 0; j < nz; ++j) {
      std::getline(ss, cell, ',');
      z[j] = std::stod(cell);
    }
    for (Eigen::Index j = 0; j < nx; ++j) {
      std::getline(ss, cell, ',');
      x[j] = std::stod(cell);
    }
    data.z.push_back(std::move(z));
    data.x_next.push_back(std::move(x));
  }
  std::ifstream side(dataset_sidecar_path(csv_path));
  if (side) {
    nlohmann::json meta = nlohmann::json::parse(side);
    data.r_w = meta.value("r_w", 0.0);
    data.generation = generation_from_string(
        meta.value("generation", std::string("repeated_init")));
    data.seed = meta.value("seed", std::uint64_t{0});
    if (meta.contains("r_z")) data.r_z = meta["r_z"].get<double>();
    if (meta.contains("rollout_length")) {
      data.rollout_length = meta["rollout_length"].get<int>();
    }
  }
  return data;
}

}  // namespace mnlqr

#endif  // MNLQR_IDENTIFY_HPP_
