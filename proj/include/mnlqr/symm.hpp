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

#ifndef MNLQR_SYMM_HPP_
#define MNLQR_SYMM_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "mnlqr/errors.hpp"

namespace mnlqr {

// Degrees of freedom of a symmetric d-by-d matrix.
inline Eigen::Index sd(Eigen::Index d) { return d * (d + 1) / 2; }

// Symmetric matrix with value semantics. Construction symmetrizes the input
// as (X + X^T)/2 and rejects inputs whose asymmetry exceeds a relative
// tolerance, so a silent transposition bug upstream fails fast instead of
// propagating.
class SymMat {
 public:
  SymMat() = default;

  explicit SymMat(const Eigen::MatrixXd& x, double rel_tol = 1e-9) {
    if (x.rows() != x.cols()) {
      throw ShapeMismatch("SymMat requires a square matrix, got " +
                          std::to_string(x.rows()) + "x" +
                          std::to_string(x.cols()));
    }
    const double asym = (x - x.transpose()).norm();
    if (asym > rel_tol * std::max(1.0, x.norm())) {
      throw ShapeMismatch("matrix is not symmetric: asymmetry " +
                          std::to_string(asym));
    }
    mat_ = 0.5 * (x + x.transpose());
  }

  static SymMat Zero(Eigen::Index d) { return SymMat(Eigen::MatrixXd::Zero(d, d)); }
  static SymMat Identity(Eigen::Index d) {
    return SymMat(Eigen::MatrixXd::Identity(d, d));
  }

  Eigen::Index dim() const { return mat_.rows(); }
  const Eigen::MatrixXd& mat() const { return mat_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return mat_(i, j); }

  // Eigenvalues in ascending order.
  Eigen::VectorXd eigenvalues() const {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
               mat_, Eigen::EigenvaluesOnly)
        .eigenvalues();
  }

  double min_eigenvalue() const { return eigenvalues().minCoeff(); }
  double max_eigenvalue() const { return eigenvalues().maxCoeff(); }

  // Positive semidefinite up to rounding: eigmin >= -tol * max(1, eigmax).
  bool is_psd(double tol = 1e-9) const {
    Eigen::VectorXd ev = eigenvalues();
    return ev.minCoeff() >= -tol * std::max(1.0, ev.maxCoeff());
  }

  // Spectral norm; for symmetric matrices this is the largest |eigenvalue|.
  double spectral_norm() const {
    if (dim() == 0) return 0.0;
    Eigen::VectorXd ev = eigenvalues();
    return std::max(std::abs(ev.minCoeff()), std::abs(ev.maxCoeff()));
  }

 private:
  Eigen::MatrixXd mat_;
};

// Largest singular value of a general rectangular matrix.
inline double spectral_norm(const Eigen::MatrixXd& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  return Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues()(0);
}

// Moore-Penrose pseudo-inverse by SVD. Singular values below
// rel_tol * sigma_max are treated as zero; the same cutoff is used wherever
// this library makes a rank decision so that translations, estimators and
// rank checks agree with each other.
inline Eigen::MatrixXd pinv(const Eigen::MatrixXd& a, double rel_tol = 1e-10) {
  if (a.rows() == 0 || a.cols() == 0) {
    return Eigen::MatrixXd::Zero(a.cols(), a.rows());
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sig = svd.singularValues();
  const double cutoff = rel_tol * sig(0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sig.size());
  for (Eigen::Index i = 0; i < sig.size(); ++i) {
    if (sig(i) > cutoff) inv(i) = 1.0 / sig(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

inline Eigen::Index numerical_rank(const Eigen::MatrixXd& a,
                                   double rel_tol = 1e-10) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  Eigen::VectorXd sig = Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues();
  if (sig.size() == 0 || sig(0) == 0.0) return 0;
  const double cutoff = rel_tol * sig(0);
  Eigen::Index r = 0;
  while (r < sig.size() && sig(r) > cutoff) ++r;
  return r;
}

// Symmetrized vectorization. Entries are taken column by column, diagonal
// entry first, strict lower triangle scaled by sqrt(2):
//   svec(X) = (X11, s*X21, ..., s*Xd1, X22, s*X32, ..., Xdd),  s = sqrt(2),
// so that svec(X)^T svec(Y) = tr(XY). Every svec-coordinate object in this
// library (qd_matrix, skron, operator matrices) uses this ordering.
inline Eigen::VectorXd svec(const SymMat& x) {
  const Eigen::Index d = x.dim();
  static const double kSqrt2 = std::sqrt(2.0);
  Eigen::VectorXd v(sd(d));
  Eigen::Index s = 0;
  for (Eigen::Index j = 0; j < d; ++j) {
    v[s++] = x(j, j);
    for (Eigen::Index i = j + 1; i < d; ++i) v[s++] = kSqrt2 * x(i, j);
  }
  return v;
}

// Dimension d such that sd(d) == len, or LengthNotTriangular.
inline Eigen::Index dim_from_sd(Eigen::Index len) {
  const Eigen::Index d =
      static_cast<Eigen::Index>((std::sqrt(8.0 * static_cast<double>(len) + 1.0) - 1.0) / 2.0 + 0.5);
  if (d < 1 || sd(d) != len) {
    throw LengthNotTriangular("vector length " + std::to_string(len) +
                              " is not d(d+1)/2 for any d >= 1");
  }
  return d;
}

inline SymMat unsvec(const Eigen::VectorXd& v) {
  const Eigen::Index d = dim_from_sd(v.size());
  static const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXd x(d, d);
  Eigen::Index s = 0;
  for (Eigen::Index j = 0; j < d; ++j) {
    x(j, j) = v[s++];
    for (Eigen::Index i = j + 1; i < d; ++i) {
      x(i, j) = kInvSqrt2 * v[s];
      x(j, i) = x(i, j);
      ++s;
    }
  }
  return SymMat(x, 0.0);
}

// Selection matrix Q_d with svec(X) = Q_d vec(X) and Q_d Q_d^T = I.
inline Eigen::MatrixXd qd_matrix(Eigen::Index d) {
  static const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(sd(d), d * d);
  Eigen::Index s = 0;
  for (Eigen::Index j = 0; j < d; ++j) {
    q(s++, j + j * d) = 1.0;
    for (Eigen::Index i = j + 1; i < d; ++i) {
      q(s, i + j * d) = kInvSqrt2;
      q(s, j + i * d) = kInvSqrt2;
      ++s;
    }
  }
  return q;
}

// Dense Kronecker product with the standard layout
// (A x B)[i*p + k, j*q + l] = A(i, j) B(k, l) for p-by-q B.
inline Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// Symmetrized Kronecker product of two m-by-n matrices,
//   V (*) U = 1/2 Q_m (U x V + V x U) Q_n^T,
// the sd(m)-by-sd(n) compression of the Kronecker product. It satisfies
// svec(Z X Z^T) = (Z (*) Z) svec(X) for symmetric X.
inline Eigen::MatrixXd skron(const Eigen::MatrixXd& v, const Eigen::MatrixXd& u) {
  if (v.rows() != u.rows() || v.cols() != u.cols()) {
    throw ShapeMismatch("skron requires matrices of equal shape");
  }
  const Eigen::Index m = v.rows();
  const Eigen::Index n = v.cols();
  Eigen::MatrixXd s = kron(u, v) + kron(v, u);
  return 0.5 * qd_matrix(m) * s * qd_matrix(n).transpose();
}

// svec(x x^T) for a vector x, i.e. the column skron(x, x).
inline Eigen::VectorXd svec_outer(const Eigen::VectorXd& x) {
  const Eigen::Index d = x.size();
  static const double kSqrt2 = std::sqrt(2.0);
  Eigen::VectorXd v(sd(d));
  Eigen::Index s = 0;
  for (Eigen::Index j = 0; j < d; ++j) {
    v[s++] = x[j] * x[j];
    for (Eigen::Index i = j + 1; i < d; ++i) v[s++] = kSqrt2 * x[i] * x[j];
  }
  return v;
}

}  // namespace mnlqr

#endif  // MNLQR_SYMM_HPP_
