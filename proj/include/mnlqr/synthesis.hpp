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

#ifndef MNLQR_SYNTHESIS_HPP_
#define MNLQR_SYNTHESIS_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include <json.hpp>

#include "mnlqr/cpop.hpp"
#include "mnlqr/errors.hpp"
#include "mnlqr/identify.hpp"
#include "mnlqr/model.hpp"
#include "mnlqr/symm.hpp"

namespace mnlqr {

// Stage cost tr[Z diag(Q, R)] and initial second moment X0.
struct LqrSpec {
  SymMat q;
  SymMat r;
  SymMat x0;

  LqrSpec(SymMat q_, SymMat r_, SymMat x0_)
      : q(std::move(q_)), r(std::move(r_)), x0(std::move(x0_)) {
    if (q.min_eigenvalue() <= 0.0) throw NotPd("Q must be positive definite");
    if (r.min_eigenvalue() <= 0.0) throw NotPd("R must be positive definite");
    if (!x0.is_psd(1e-9)) throw NotPsd("X0 must be psd", x0.min_eigenvalue());
  }
};

struct SynthesisResult {
  SymMat p;
  Eigen::MatrixXd k;
  double value = 0.0;
  int iterations = 0;
  double residual = 0.0;
  double rho_closed_loop = 0.0;

  nlohmann::json to_json() const {
    auto mat_to_json = [](const Eigen::MatrixXd& m) {
      nlohmann::json rows = nlohmann::json::array();
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
      }
      return rows;
    };
    return nlohmann::json{{"P", mat_to_json(p.mat())},
                          {"K", mat_to_json(k)},
                          {"value", value},
                          {"iterations", iterations},
                          {"residual", residual},
                          {"rho_closed_loop", rho_closed_loop}};
  }
};

// One application of the generalized Riccati operator
//   R(P) = Q + F*(P) - H*(P)^T (R + G*(P))^{-1} H*(P),
// with the adjoint blocks of the second-moment dynamics at parameter W. For
// n_w = 1, W = [1] this is the classical discrete-time Riccati map.
inline SymMat riccati_apply(const ModeTensor& m, const SymMat& w,
                            const LqrSpec& spec, const SymMat& p) {
  const AdjointBlocks blocks = adjoint_blocks(m, w, p);
  Eigen::MatrixXd inner = spec.r.mat() + blocks.g.mat();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(inner);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().minCoeff() <= 1e-300) {
    throw SingularInnerMatrix(
        "R + G*(P) is numerically singular; check that W is psd and P valid");
  }
  Eigen::MatrixXd next = spec.q.mat() + blocks.f.mat() -
                         blocks.h.transpose() * ldlt.solve(blocks.h);
  return SymMat(next, 1e-6);
}

inline Eigen::MatrixXd riccati_gain(const ModeTensor& m, const SymMat& w,
                                    const LqrSpec& spec, const SymMat& p) {
  const AdjointBlocks blocks = adjoint_blocks(m, w, p);
  Eigen::MatrixXd inner = spec.r.mat() + blocks.g.mat();
  return -inner.ldlt().solve(blocks.h);
}

// Value iteration P_{k+1} = R(P_k) from P_0 = 0. The iterates are
// nondecreasing in the psd order and converge exactly when a stabilizing
// gain exists; an iterate blowing past the divergence cap is the practical
// signal that the (possibly robustified) dynamics cannot be stabilized.
inline SynthesisResult riccati_fixed_point(const ModeTensor& m, const SymMat& w,
                                           const LqrSpec& spec,
                                           double tol = 1e-10,
                                           int max_iter = 10000) {
  if (spec.q.dim() != m.nx() || spec.r.dim() != m.nu() ||
      spec.x0.dim() != m.nx()) {
    throw DimensionMismatch("lqr spec does not match the model dimensions");
  }
  if (w.dim() != m.nw()) {
    throw DimensionMismatch("parameter W must be n_w x n_w");
  }
  const double cap = 1e12 * spec.q.mat().norm();
  const Eigen::MatrixXd a2 = matricize(m.a_tensor(), 2);
  const Eigen::MatrixXd b2 = matricize(m.b_tensor(), 2);
  auto advance = [&](const Eigen::MatrixXd& p) {
    const Eigen::MatrixXd wp = kron(w.mat(), p);
    const Eigen::MatrixXd g = b2 * wp * b2.transpose();
    const Eigen::MatrixXd h = b2 * wp * a2.transpose();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(spec.r.mat() + g);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() <= 1e-300) {
      throw SingularInnerMatrix("R + G*(P) is numerically singular");
    }
    Eigen::MatrixXd next =
        spec.q.mat() + a2 * wp * a2.transpose() - h.transpose() * ldlt.solve(h);
    return Eigen::MatrixXd(0.5 * (next + next.transpose()));
  };

  Eigen::MatrixXd iterate = Eigen::MatrixXd::Zero(m.nx(), m.nx());
  int iterations = 0;
  double gap = 0.0;
  double gap_half = 0.0;
  for (; iterations < max_iter; ++iterations) {
    Eigen::MatrixXd next = advance(iterate);
    gap = (next - iterate).norm();
    const double prev_norm = iterate.norm();
    // Monotone ascent from zero; a decrease signals an invalid parameter.
    if (SymMat(next - iterate, 1e-3).min_eigenvalue() <
        -1e-8 * std::max(1.0, prev_norm)) {
      throw NotConverged("value iteration lost monotonicity");
    }
    if (!next.allFinite() || next.norm() > cap) {
      throw Diverged(
          "value iteration diverged: no stabilizing controller for this "
          "parameter (ambiguity set too large)");
    }
    if (iterations == max_iter / 2) gap_half = gap;
    iterate = next;
    if (gap <= tol * prev_norm) {
      ++iterations;
      break;
    }
  }
  if (iterations >= max_iter) {
    // Increments that stopped shrinking are divergence in slow motion.
    if (gap >= gap_half) {
      throw Diverged(
          "value iteration increments stopped contracting: no stabilizing "
          "controller for this parameter (ambiguity set too large)");
    }
    throw NotConverged("value iteration did not converge in " +
                       std::to_string(max_iter) + " iterations");
  }
  const SymMat p(iterate, 1e-6);
  SynthesisResult out;
  out.p = p;
  out.k = riccati_gain(m, w, spec, p);
  out.value = (p.mat() * spec.x0.mat()).trace();
  out.iterations = iterations;
  out.residual = (riccati_apply(m, w, spec, p).mat() - p.mat()).norm();
  out.rho_closed_loop = closed_loop(m, w, out.k).spectral_radius();
  if (out.rho_closed_loop >= 1.0) {
    throw NotConverged("converged iterate failed the closed-loop stability check");
  }
  return out;
}

// Distributionally robust synthesis: solve the Riccati fixed point at the
// worst-case parameter W_bar = w_hat + beta_w I. The returned gain
// stabilizes every W in the ambiguity interval, and the true system with
// probability at least 1 - delta.
inline SynthesisResult dr_synthesize(const ModeTensor& m, const AmbiguitySet& amb,
                                     const LqrSpec& spec, double tol = 1e-10,
                                     int max_iter = 10000) {
  const Eigen::Index nw = amb.w_hat.dim();
  if (nw != m.nw()) {
    throw DimensionMismatch("ambiguity set does not match the model");
  }
  Eigen::MatrixXd wbar_raw =
      amb.w_hat.mat() + amb.beta_w * Eigen::MatrixXd::Identity(nw, nw);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(wbar_raw);
  const double eigmin = eig.eigenvalues().minCoeff();
  if (eigmin < -1e-9 * std::max(1.0, eig.eigenvalues().maxCoeff())) {
    throw WBarNotPsd("w_hat + beta_w I is not psd; the interval guarantee "
                     "does not yield a CP upper dynamics",
                     eigmin);
  }
  // Clip rounding-level negative eigenvalues so the worst case stays CP.
  Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
  SymMat wbar(Eigen::MatrixXd(eig.eigenvectors() * clipped.asDiagonal() *
                              eig.eigenvectors().transpose()),
              1e-6);
  return riccati_fixed_point(m, wbar, spec, tol, max_iter);
}

// Infinite-horizon cost of the fixed gain K on the dynamics with parameter
// w_true, tr[P X0] with P solving P - E_K*(P) = Q + K^T R K.
inline double closed_loop_cost(const ModeTensor& m, const SymMat& w_true,
                               const Eigen::MatrixXd& k, const LqrSpec& spec) {
  CpOperator loop = closed_loop(m, w_true, k);
  const double rho = loop.spectral_radius();
  if (rho >= 1.0 - 1e-9) {
    throw UnstableClosedLoop("closed loop is not mean-square stable", rho);
  }
  Eigen::MatrixXd h_k = spec.q.mat() + k.transpose() * spec.r.mat() * k;
  SymMat p = loop.lyapunov_solve(SymMat(h_k, 1e-6));
  return (p.mat() * spec.x0.mat()).trace();
}

// (J(K) - J(K*)) / J(K*) against the exact optimum for w_true; nonnegative up
// to solver tolerances.
inline double relative_suboptimality(const ModeTensor& m, const SymMat& w_true,
                                     const Eigen::MatrixXd& k_candidate,
                                     const LqrSpec& spec) {
  const SynthesisResult opt = riccati_fixed_point(m, w_true, spec);
  const double candidate = closed_loop_cost(m, w_true, k_candidate, spec);
  return (candidate - opt.value) / opt.value;
}

}  // namespace mnlqr

#endif  // MNLQR_SYNTHESIS_HPP_
