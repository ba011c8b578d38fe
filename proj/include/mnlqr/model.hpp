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

#ifndef MNLQR_MODEL_HPP_
#define MNLQR_MODEL_HPP_

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mnlqr/cpop.hpp"
#include "mnlqr/errors.hpp"
#include "mnlqr/symm.hpp"
#include "mnlqr/tensor.hpp"

namespace mnlqr {

// Mode tensor M of shape n_x x n_z x n_w with n_z = n_x + n_u. Frontal slice
// k holds the mode pair [A_k, B_k]. A structured tensor treats slice 0 as the
// known deterministic mode and expects disturbances of the form w = (1, w~).
//
// The symmetrized Kronecker square M (*) M is precomputed at construction; it
// drives both the second-moment dynamics and the least-squares estimators.
class ModeTensor {
 public:
  // Empty placeholder; every operation requires a properly constructed tensor.
  ModeTensor() : nx_(0), nu_(0), structured_(false) {}

  ModeTensor(Tensor3 tensor, Eigen::Index nx, Eigen::Index nu,
             bool structured = false)
      : nx_(nx),
        nu_(nu),
        structured_(structured),
        tensor_(std::move(tensor)),
        skron_(tensor_skron(tensor_)) {
    if (nx < 1 || nu < 0 || tensor_.dim1() != nx ||
        tensor_.dim2() != nx + nu || tensor_.dim3() < 1) {
      throw DimensionMismatch("mode tensor must be n_x x (n_x+n_u) x n_w");
    }
    if (structured_ && tensor_.dim3() < 2) {
      throw DimensionMismatch(
          "a structured mode tensor needs a deterministic slice plus at "
          "least one stochastic slice");
    }
  }

  // Tensor from a list of [A_k, B_k] slices (each n_x x n_z).
  static ModeTensor from_slices(const std::vector<Eigen::MatrixXd>& slices,
                                Eigen::Index nx, Eigen::Index nu,
                                bool structured = false) {
    if (slices.empty()) throw EmptyModeList("slice list must be nonempty");
    Tensor3 t(nx, nx + nu, static_cast<Eigen::Index>(slices.size()));
    for (std::size_t k = 0; k < slices.size(); ++k) {
      if (slices[k].rows() != nx || slices[k].cols() != nx + nu) {
        throw DimensionMismatch("each slice must be n_x x (n_x+n_u)");
      }
      for (Eigen::Index j = 0; j < nx + nu; ++j) {
        for (Eigen::Index i = 0; i < nx; ++i) {
          t(i, j, static_cast<Eigen::Index>(k)) = slices[k](i, j);
        }
      }
    }
    return ModeTensor(std::move(t), nx, nu, structured);
  }

  // Model-free basis: n_w = n_x * n_z and M_(3) = I, which spans every mode
  // configuration and so satisfies model equivalence against any truth.
  static ModeTensor model_free(Eigen::Index nx, Eigen::Index nu) {
    const Eigen::Index nz = nx + nu;
    Eigen::MatrixXd m3 = Eigen::MatrixXd::Identity(nx * nz, nx * nz);
    return ModeTensor(fold(m3, 3, nx, nz, nx * nz), nx, nu, false);
  }

  Eigen::Index nx() const { return nx_; }
  Eigen::Index nu() const { return nu_; }
  Eigen::Index nz() const { return nx_ + nu_; }
  Eigen::Index nw() const { return tensor_.dim3(); }
  bool structured() const { return structured_; }
  const Tensor3& tensor() const { return tensor_; }
  const Tensor3& skron_tensor() const { return skron_; }

  Eigen::MatrixXd mode3() const { return matricize(tensor_, 3); }

  // Partitions A = [M]_{:,0:nx,:} and B = [M]_{:,nx:nz,:}.
  Tensor3 a_tensor() const {
    Tensor3 a(nx_, nx_, nw());
    for (Eigen::Index k = 0; k < nw(); ++k)
      for (Eigen::Index j = 0; j < nx_; ++j)
        for (Eigen::Index i = 0; i < nx_; ++i) a(i, j, k) = tensor_(i, j, k);
    return a;
  }

  Tensor3 b_tensor() const {
    Tensor3 b(nx_, nu_, nw());
    for (Eigen::Index k = 0; k < nw(); ++k)
      for (Eigen::Index j = 0; j < nu_; ++j)
        for (Eigen::Index i = 0; i < nx_; ++i) b(i, j, k) = tensor_(i, nx_ + j, k);
    return b;
  }

  // Stochastic part of a structured tensor (slices 1..n_w-1).
  ModeTensor truncated() const {
    if (!structured_) {
      throw NotStructured("truncated() requires a structured mode tensor");
    }
    Tensor3 t(nx_, nz(), nw() - 1);
    for (Eigen::Index k = 1; k < nw(); ++k)
      for (Eigen::Index j = 0; j < nz(); ++j)
        for (Eigen::Index i = 0; i < nx_; ++i) t(i, j, k - 1) = tensor_(i, j, k);
    return ModeTensor(std::move(t), nx_, nu_, false);
  }

  Eigen::MatrixXd deterministic_slice() const {
    if (!structured_) {
      throw NotStructured("deterministic_slice() requires a structured tensor");
    }
    return tensor_.slice3(0);
  }

  nlohmann::json to_json() const {
    Eigen::MatrixXd m3 = mode3();
    std::vector<double> flat;
    flat.reserve(m3.size());
    for (Eigen::Index i = 0; i < m3.rows(); ++i)
      for (Eigen::Index j = 0; j < m3.cols(); ++j) flat.push_back(m3(i, j));
    return nlohmann::json{{"nx", nx_},
                          {"nu", nu_},
                          {"nw", nw()},
                          {"structured", structured_},
                          {"mode3_matrix", flat}};
  }

  static ModeTensor from_json(const nlohmann::json& j) {
    const Eigen::Index nx = j.at("nx").get<Eigen::Index>();
    const Eigen::Index nu = j.at("nu").get<Eigen::Index>();
    const Eigen::Index nw = j.at("nw").get<Eigen::Index>();
    const bool structured = j.at("structured").get<bool>();
    const auto flat = j.at("mode3_matrix").get<std::vector<double>>();
    const Eigen::Index nz = nx + nu;
    if (static_cast<Eigen::Index>(flat.size()) != nw * nx * nz) {
      throw DimensionMismatch("mode3_matrix must hold nw * nx * nz entries");
    }
    Eigen::MatrixXd m3(nw, nx * nz);
    Eigen::Index s = 0;
    for (Eigen::Index i = 0; i < nw; ++i)
      for (Eigen::Index j2 = 0; j2 < nx * nz; ++j2) m3(i, j2) = flat[s++];
    return ModeTensor(fold(m3, 3, nx, nz, nw), nx, nu, structured);
  }

 private:
  Eigen::Index nx_, nu_;
  bool structured_;
  Tensor3 tensor_;
  Tensor3 skron_;
};

// True system description: modes plus the second moment of its disturbance
// (and the mean, when it matters).
struct GroundTruth {
  ModeTensor v_tensor;
  SymMat v_moment;
  std::optional<Eigen::VectorXd> mean;
};

struct RankReport {
  Eigen::Index rank_model;
  Eigen::Index rank_stacked;
  Eigen::Index required;
  bool equivalent;
};

// Model equivalence: rank(M_(3)) == rank([M_(3); V_(3)]) == n_w, evaluated
// with the shared SVD cutoff. For structured tensors the check runs on the
// truncated tensors and additionally requires matching deterministic slices.
inline RankReport check_model_equivalence(const ModeTensor& m,
                                          const ModeTensor& v,
                                          double rel_tol = 1e-10) {
  if (m.nx() != v.nx() || m.nz() != v.nz()) {
    throw DimensionMismatch("model tensors must share n_x and n_z");
  }
  if (m.structured() != v.structured()) {
    return RankReport{0, 0, m.structured() ? m.nw() - 1 : m.nw(), false};
  }
  if (m.structured()) {
    const double slice_gap =
        (m.deterministic_slice() - v.deterministic_slice()).norm();
    RankReport rep = check_model_equivalence(m.truncated(), v.truncated(), rel_tol);
    rep.equivalent = rep.equivalent &&
                     slice_gap <= 1e-12 * std::max(1.0, v.deterministic_slice().norm());
    return rep;
  }
  const Eigen::MatrixXd m3 = m.mode3();
  const Eigen::MatrixXd v3 = v.mode3();
  Eigen::MatrixXd stacked(m3.rows() + v3.rows(), m3.cols());
  stacked << m3, v3;
  RankReport rep;
  rep.required = m.nw();
  rep.rank_model = numerical_rank(m3, rel_tol);
  rep.rank_stacked = numerical_rank(stacked, rel_tol);
  rep.equivalent = rep.rank_model == rep.required && rep.rank_stacked == rep.required;
  return rep;
}

// Disturbance translation w = pinv(M_(3)^T) V_(3)^T v mapping the true
// disturbance onto the chosen basis; trajectories are preserved under model
// equivalence. Structured tensors map the random part and keep the leading
// one: w = (1, pinv(M~_(3)^T) V~_(3)^T v).
inline Eigen::VectorXd translate_disturbance(const ModeTensor& m,
                                             const ModeTensor& v,
                                             const Eigen::VectorXd& dist) {
  if (!check_model_equivalence(m, v).equivalent) {
    throw ModelNotEquivalent("mode tensor cannot represent the true modes");
  }
  if (m.structured()) {
    const ModeTensor mt = m.truncated();
    const ModeTensor vt = v.truncated();
    if (dist.size() != vt.nw()) {
      throw DimensionMismatch("structured disturbance must have length n_v");
    }
    Eigen::VectorXd wt =
        pinv(mt.mode3().transpose()) * (vt.mode3().transpose() * dist);
    Eigen::VectorXd w(wt.size() + 1);
    w[0] = 1.0;
    w.tail(wt.size()) = wt;
    return w;
  }
  if (dist.size() != v.nw()) {
    throw DimensionMismatch("disturbance must have length n_v");
  }
  return pinv(m.mode3().transpose()) * (v.mode3().transpose() * dist);
}

// Second-moment translation W = T V T^T with T = pinv(M_(3)^T) V_(3)^T.
inline SymMat translate_second_moment(const ModeTensor& m, const ModeTensor& v,
                                      const SymMat& v_moment,
                                      double psd_tol = 1e-9) {
  if (!check_model_equivalence(m, v).equivalent) {
    throw ModelNotEquivalent("mode tensor cannot represent the true modes");
  }
  if (!v_moment.is_psd(psd_tol)) {
    throw NotPsd("true second moment must be psd", v_moment.min_eigenvalue());
  }
  const ModeTensor& mm = m.structured() ? m.truncated() : m;
  const ModeTensor& vv = v.structured() ? v.truncated() : v;
  if (v_moment.dim() != vv.nw()) {
    throw DimensionMismatch("second moment must be n_v x n_v");
  }
  Eigen::MatrixXd t = pinv(mm.mode3().transpose()) * vv.mode3().transpose();
  return SymMat(t * v_moment.mat() * t.transpose(), 1e-6);
}

// Norm bound for translated disturbances, sigma_max(T) * r_v. Equals r_v when
// the translation is the identity (true-mode basis with independent modes).
inline double translated_norm_bound(const ModeTensor& m, const ModeTensor& v,
                                    double r_v) {
  const ModeTensor& mm = m.structured() ? m.truncated() : m;
  const ModeTensor& vv = v.structured() ? v.truncated() : v;
  Eigen::MatrixXd t = pinv(mm.mode3().transpose()) * vv.mode3().transpose();
  return spectral_norm(t) * r_v;
}

// Second-moment dynamics E(W; Z) = M_(1) (W x Z) M_(1)^T as an operator from
// Sym(n_z) to Sym(n_x), linear in W. The CP flag reflects whether W is psd.
inline CpOperator moment_dynamics(const ModeTensor& m, const SymMat& w,
                                  double psd_tol = 1e-9) {
  if (w.dim() != m.nw()) {
    throw DimensionMismatch("moment_dynamics: parameter must be n_w x n_w");
  }
  return CpOperator::from_skron_tensor(m.skron_tensor(), w, m.nz(), m.nx(),
                                       w.is_psd(psd_tol));
}

// Closed-loop second-moment dynamics E_K(X) = E([I; K] X [I, K^T]).
inline CpOperator closed_loop(const ModeTensor& m, const SymMat& w,
                              const Eigen::MatrixXd& k) {
  if (k.rows() != m.nu() || k.cols() != m.nx()) {
    throw DimensionMismatch("gain must be n_u x n_x");
  }
  CpOperator e = moment_dynamics(m, w);
  Eigen::MatrixXd ik(m.nz(), m.nx());
  ik.topRows(m.nx()) = Eigen::MatrixXd::Identity(m.nx(), m.nx());
  ik.bottomRows(m.nu()) = k;
  Eigen::MatrixXd mat = e.matrix() * skron(ik, ik);
  return CpOperator::from_matrix(mat, m.nx(), m.nx(), e.cp_constructed());
}

struct AdjointBlocks {
  SymMat f;          // A_(2) (W x P) A_(2)^T
  Eigen::MatrixXd h;  // B_(2) (W x P) A_(2)^T
  SymMat g;          // B_(2) (W x P) B_(2)^T
};

// Blocks of the adjoint E*(P) partitioned at n_x; in the deterministic case
// they reduce to A^T P A, B^T P A and B^T P B.
inline AdjointBlocks adjoint_blocks(const ModeTensor& m, const SymMat& w,
                                    const SymMat& p) {
  if (p.dim() != m.nx()) {
    throw DimensionMismatch("adjoint_blocks: P must be n_x x n_x");
  }
  if (w.dim() != m.nw()) {
    throw DimensionMismatch("adjoint_blocks: W must be n_w x n_w");
  }
  const Eigen::MatrixXd a2 = matricize(m.a_tensor(), 2);
  const Eigen::MatrixXd b2 = matricize(m.b_tensor(), 2);
  const Eigen::MatrixXd wp = kron(w.mat(), p.mat());
  AdjointBlocks out;
  out.f = SymMat(a2 * wp * a2.transpose(), 1e-6);
  out.g = SymMat(b2 * wp * b2.transpose(), 1e-6);
  out.h = b2 * wp * a2.transpose();
  return out;
}

// One step of the dynamics, x_next = [[M; I, z, w]].
inline Eigen::VectorXd step(const ModeTensor& m, const Eigen::VectorXd& z,
                            const Eigen::VectorXd& w) {
  if (z.size() != m.nz() || w.size() != m.nw()) {
    throw DimensionMismatch("step: z must be n_z, w must be n_w");
  }
  return mode_vec_product(m.tensor(), w, 3) * z;
}

// Parameter matrix of the structured dynamics,
// W = diag(0, Sigma) + (1, mu)(1, mu)^T.
inline SymMat structured_parameter(const Eigen::VectorXd& mu,
                                   const SymMat& sigma) {
  if (sigma.dim() != mu.size()) {
    throw DimensionMismatch("structured_parameter: dimensions must match");
  }
  const Eigen::Index n = mu.size() + 1;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  w.bottomRightCorner(mu.size(), mu.size()) = sigma.mat();
  Eigen::VectorXd one_mu(n);
  one_mu[0] = 1.0;
  one_mu.tail(mu.size()) = mu;
  w += one_mu * one_mu.transpose();
  return SymMat(w, 1e-9);
}

}  // namespace mnlqr

#endif  // MNLQR_MODEL_HPP_
