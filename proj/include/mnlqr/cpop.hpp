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

#ifndef MNLQR_CPOP_HPP_
#define MNLQR_CPOP_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "mnlqr/errors.hpp"
#include "mnlqr/symm.hpp"
#include "mnlqr/tensor.hpp"

namespace mnlqr {

// Linear operator on symmetric matrices, S : Sym(n) -> Sym(m), stored through
// its matrix representation in svec coordinates:
//   apply(X) = unsvec(S_mat * svec(X)),   S_mat in R^{sd(m) x sd(n)}.
//
// Operators built from Kraus modes or from a mode tensor with a psd parameter
// are completely positive and carry a flag; the exact operator norm
// ||S(I)||_2 is only available for those.
class CpOperator {
 public:
  CpOperator() : in_dim_(0), out_dim_(0), cp_(false) {}

  static CpOperator from_matrix(const Eigen::MatrixXd& op_matrix,
                                Eigen::Index in_dim, Eigen::Index out_dim,
                                bool cp_constructed = false) {
    if (op_matrix.rows() != sd(out_dim) || op_matrix.cols() != sd(in_dim)) {
      throw ShapeMismatch("operator matrix must be sd(out) x sd(in)");
    }
    CpOperator op;
    op.in_dim_ = in_dim;
    op.out_dim_ = out_dim;
    op.cp_ = cp_constructed;
    op.mat_ = op_matrix;
    return op;
  }

  // S(X) = sum_i A_i X A_i^T with matrix sum_i A_i (*) A_i.
  static CpOperator from_modes(const std::vector<Eigen::MatrixXd>& modes) {
    if (modes.empty()) throw EmptyModeList("mode list must be nonempty");
    const Eigen::Index m = modes[0].rows();
    const Eigen::Index n = modes[0].cols();
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(sd(m), sd(n));
    for (const Eigen::MatrixXd& a : modes) {
      if (a.rows() != m || a.cols() != n) {
        throw ShapeMismatch("all modes must share one shape");
      }
      s += skron(a, a);
    }
    return from_matrix(s, n, m, true);
  }

  // S(X) = A_(1) (W x X) A_(1)^T for a mode tensor A (m x n x r) and psd
  // parameter W; the matrix is (A (*) A) xbar_3 svec(W).
  static CpOperator from_tensor(const Tensor3& a, const SymMat& w,
                                double psd_tol = 1e-9) {
    if (w.dim() != a.dim3()) {
      throw ShapeMismatch("parameter dimension must match the tensor depth");
    }
    if (!w.is_psd(psd_tol)) {
      throw NotPsd("cp_from_tensor parameter is not psd", w.min_eigenvalue());
    }
    return from_skron_tensor(tensor_skron(a), w, a.dim2(), a.dim1());
  }

  // Same construction without the psd requirement; the result is flagged CP
  // only when W is psd within tolerance. Used where the parameter is an
  // estimate that may be slightly indefinite.
  static CpOperator from_tensor_param(const Tensor3& a, const SymMat& w,
                                      double psd_tol = 1e-9) {
    if (w.dim() != a.dim3()) {
      throw ShapeMismatch("parameter dimension must match the tensor depth");
    }
    return from_skron_tensor(tensor_skron(a), w, a.dim2(), a.dim1(),
                             w.is_psd(psd_tol));
  }

  // Construction from a precomputed A (*) A, for call sites that evaluate
  // many parameters on one tensor.
  static CpOperator from_skron_tensor(const Tensor3& askron, const SymMat& w,
                                      Eigen::Index in_dim, Eigen::Index out_dim,
                                      bool cp_constructed = true) {
    Eigen::MatrixXd s = mode_vec_product(askron, svec(w), 3);
    return from_matrix(s, in_dim, out_dim, cp_constructed);
  }

  Eigen::Index in_dim() const { return in_dim_; }
  Eigen::Index out_dim() const { return out_dim_; }
  bool cp_constructed() const { return cp_; }
  const Eigen::MatrixXd& matrix() const { return mat_; }

  SymMat apply(const SymMat& x) const {
    if (x.dim() != in_dim_) {
      throw ShapeMismatch("apply: argument dimension " + std::to_string(x.dim()) +
                          " != " + std::to_string(in_dim_));
    }
    return unsvec(mat_ * svec(x));
  }

  // Adjoint for the trace inner product, tr[S(X) Y] = tr[X S*(Y)]; its matrix
  // is the transpose.
  SymMat adjoint_apply(const SymMat& y) const {
    if (y.dim() != out_dim_) {
      throw ShapeMismatch("adjoint_apply: argument dimension " +
                          std::to_string(y.dim()) + " != " +
                          std::to_string(out_dim_));
    }
    return unsvec(mat_.transpose() * svec(y));
  }

  // Exact operator norm ||S||_2 = ||S(I)||_2, valid for CP operators only.
  double op_norm() const {
    if (!cp_) {
      throw NotCpConstructed(
          "op_norm requires a CP-constructed operator; use op_norm_bound");
    }
    return apply(SymMat::Identity(in_dim_)).spectral_norm();
  }

  // Generic bound ||S||_2 <= sqrt(m) ||S_mat||_2.
  double op_norm_bound() const {
    return std::sqrt(static_cast<double>(out_dim_)) * mnlqr::spectral_norm(mat_);
  }

  double spectral_radius() const {
    if (in_dim_ != out_dim_) {
      throw NotSquare("spectral radius requires a square operator");
    }
    return Eigen::EigenSolver<Eigen::MatrixXd>(mat_, false)
        .eigenvalues()
        .cwiseAbs()
        .maxCoeff();
  }

  bool is_mss(double tol = 1e-9) const { return spectral_radius() < 1.0 - tol; }

  // Unique P solving P - S*(P) = H for H > 0 and rho(S) < 1, by one dense
  // solve of (I - S_mat^T) svec(P) = svec(H). P is positive definite and
  // satisfies tr[P X] = tr[H sum_t S^t(X)].
  SymMat lyapunov_solve(const SymMat& h, double tol = 1e-9) const {
    if (in_dim_ != out_dim_) {
      throw NotSquare("lyapunov_solve requires a square operator");
    }
    if (h.dim() != in_dim_) {
      throw ShapeMismatch("lyapunov_solve: rhs dimension mismatch");
    }
    const double rho = spectral_radius();
    if (rho >= 1.0 - tol) {
      throw Unstable("lyapunov_solve requires a stable operator", rho);
    }
    if (h.min_eigenvalue() <= 0.0) {
      throw NotPd("lyapunov_solve requires H > 0");
    }
    Eigen::MatrixXd lhs =
        Eigen::MatrixXd::Identity(mat_.rows(), mat_.rows()) - mat_.transpose();
    Eigen::VectorXd p = lhs.partialPivLu().solve(svec(h));
    return unsvec(p);
  }

 private:
  Eigen::Index in_dim_, out_dim_;
  bool cp_;
  Eigen::MatrixXd mat_;
};

// Outer spectral radius sqrt(rho(sum_i A_i x A_i)) of a family of square
// matrices; it upper-bounds the joint spectral radius of the switching system
// and its square equals the spectral radius of the CP operator with these
// modes.
inline double outer_spectral_radius(const std::vector<Eigen::MatrixXd>& modes) {
  if (modes.empty()) throw EmptyModeList("mode list must be nonempty");
  const Eigen::Index d = modes[0].rows();
  for (const Eigen::MatrixXd& a : modes) {
    if (a.rows() != d || a.cols() != d) {
      throw ShapeMismatch("outer_spectral_radius requires square modes of one size");
    }
  }
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d * d, d * d);
  for (const Eigen::MatrixXd& a : modes) s += kron(a, a);
  const double rho = Eigen::EigenSolver<Eigen::MatrixXd>(s, false)
                         .eigenvalues()
                         .cwiseAbs()
                         .maxCoeff();
  return std::sqrt(rho);
}

}  // namespace mnlqr

#endif  // MNLQR_CPOP_HPP_
