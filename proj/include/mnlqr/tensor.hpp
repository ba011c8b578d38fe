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

#ifndef MNLQR_TENSOR_HPP_
#define MNLQR_TENSOR_HPP_

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mnlqr/errors.hpp"
#include "mnlqr/rng.hpp"
#include "mnlqr/symm.hpp"

namespace mnlqr {

// Dense third-order tensor.
//
// Memory layout: entry (i, j, k) is stored at i + q1*(j + q2*k), i.e. the
// frontal slices [T]_{::k} are column-major q1-by-q2 matrices stacked along
// the third axis. With this layout the mode-1 matricization (rows indexed by
// i, columns by j + k*q2) and the transposed mode-3 matricization are plain
// reshapes, which ties the matricization column order to the column-major
// vec(.) used by skron.
//
// Element access is 0-based; mode arguments follow the 1/2/3 naming of the
// matricizations.
class Tensor3 {
 public:
  Tensor3() : q1_(0), q2_(0), q3_(0) {}

  Tensor3(Eigen::Index q1, Eigen::Index q2, Eigen::Index q3)
      : q1_(q1), q2_(q2), q3_(q3), data_(Eigen::VectorXd::Zero(q1 * q2 * q3)) {}

  Eigen::Index dim1() const { return q1_; }
  Eigen::Index dim2() const { return q2_; }
  Eigen::Index dim3() const { return q3_; }
  Eigen::Index size() const { return data_.size(); }

  double operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k) const {
    return data_[i + q1_ * (j + q2_ * k)];
  }
  double& operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k) {
    return data_[i + q1_ * (j + q2_ * k)];
  }

  const Eigen::VectorXd& data() const { return data_; }

  // Frontal slice [T]_{::k}.
  Eigen::MatrixXd slice3(Eigen::Index k) const {
    return Eigen::Map<const Eigen::MatrixXd>(data_.data() + q1_ * q2_ * k, q1_,
                                             q2_);
  }

  // Horizontal slice [T]_{i::} (q2-by-q3).
  Eigen::MatrixXd slice1(Eigen::Index i) const {
    Eigen::MatrixXd out(q2_, q3_);
    for (Eigen::Index k = 0; k < q3_; ++k) {
      for (Eigen::Index j = 0; j < q2_; ++j) out(j, k) = (*this)(i, j, k);
    }
    return out;
  }

  // Lateral slice [T]_{:j:} (q1-by-q3).
  Eigen::MatrixXd slice2(Eigen::Index j) const {
    Eigen::MatrixXd out(q1_, q3_);
    for (Eigen::Index k = 0; k < q3_; ++k) {
      for (Eigen::Index i = 0; i < q1_; ++i) out(i, k) = (*this)(i, j, k);
    }
    return out;
  }

  bool same_dims(const Tensor3& other) const {
    return q1_ == other.q1_ && q2_ == other.q2_ && q3_ == other.q3_;
  }

 private:
  Eigen::Index q1_, q2_, q3_;
  Eigen::VectorXd data_;
};

// Mode-n matricization: row r of the result is vec([T]_{n|r})^T, so
//   mode 1: (q1) x (q2 q3), column j + k*q2,
//   mode 2: (q2) x (q1 q3), column i + k*q1,
//   mode 3: (q3) x (q1 q2), column i + j*q1.
inline Eigen::MatrixXd matricize(const Tensor3& t, int mode) {
  const Eigen::Index q1 = t.dim1(), q2 = t.dim2(), q3 = t.dim3();
  switch (mode) {
    case 1:
      return Eigen::Map<const Eigen::MatrixXd>(t.data().data(), q1, q2 * q3);
    case 2: {
      Eigen::MatrixXd out(q2, q1 * q3);
      for (Eigen::Index k = 0; k < q3; ++k) {
        for (Eigen::Index j = 0; j < q2; ++j) {
          for (Eigen::Index i = 0; i < q1; ++i) out(j, i + k * q1) = t(i, j, k);
        }
      }
      return out;
    }
    case 3:
      return Eigen::Map<const Eigen::MatrixXd>(t.data().data(), q1 * q2, q3)
          .transpose();
    default:
      throw InvalidMode("tensor mode must be 1, 2 or 3, got " +
                        std::to_string(mode));
  }
}

// Inverse of matricize: fold an (p_n) x (prod of other dims) matrix back into
// a tensor whose mode-n dimension is m.rows() and whose other dimensions are
// those of the reference shape (q1, q2, q3).
inline Tensor3 fold(const Eigen::MatrixXd& m, int mode, Eigen::Index q1,
                    Eigen::Index q2, Eigen::Index q3) {
  Tensor3 out(q1, q2, q3);
  switch (mode) {
    case 1:
      for (Eigen::Index k = 0; k < q3; ++k)
        for (Eigen::Index j = 0; j < q2; ++j)
          for (Eigen::Index i = 0; i < q1; ++i) out(i, j, k) = m(i, j + k * q2);
      return out;
    case 2:
      for (Eigen::Index k = 0; k < q3; ++k)
        for (Eigen::Index j = 0; j < q2; ++j)
          for (Eigen::Index i = 0; i < q1; ++i) out(i, j, k) = m(j, i + k * q1);
      return out;
    case 3:
      for (Eigen::Index k = 0; k < q3; ++k)
        for (Eigen::Index j = 0; j < q2; ++j)
          for (Eigen::Index i = 0; i < q1; ++i) out(i, j, k) = m(k, i + j * q1);
      return out;
    default:
      throw InvalidMode("tensor mode must be 1, 2 or 3, got " +
                        std::to_string(mode));
  }
}

// Mode-n product: the tensor with matricize(result, n) == x * matricize(t, n).
inline Tensor3 mode_product(const Tensor3& t, const Eigen::MatrixXd& x,
                            int mode) {
  if (mode < 1 || mode > 3) {
    throw InvalidMode("tensor mode must be 1, 2 or 3, got " +
                      std::to_string(mode));
  }
  const Eigen::Index qn = mode == 1 ? t.dim1() : (mode == 2 ? t.dim2() : t.dim3());
  if (x.cols() != qn) {
    throw ShapeMismatch("mode-" + std::to_string(mode) + " product needs " +
                        std::to_string(qn) + " columns, got " +
                        std::to_string(x.cols()));
  }
  Eigen::MatrixXd m = x * matricize(t, mode);
  const Eigen::Index q1 = mode == 1 ? x.rows() : t.dim1();
  const Eigen::Index q2 = mode == 2 ? x.rows() : t.dim2();
  const Eigen::Index q3 = mode == 3 ? x.rows() : t.dim3();
  return fold(m, mode, q1, q2, q3);
}

// Mode-n vector product sum_j x_j [T]_{n|j}; the order drops by one and the
// result is a matrix over the two remaining dimensions (rows = lower mode).
inline Eigen::MatrixXd mode_vec_product(const Tensor3& t,
                                        const Eigen::VectorXd& x, int mode) {
  if (mode < 1 || mode > 3) {
    throw InvalidMode("tensor mode must be 1, 2 or 3, got " +
                      std::to_string(mode));
  }
  const Eigen::Index qn = mode == 1 ? t.dim1() : (mode == 2 ? t.dim2() : t.dim3());
  if (x.size() != qn) {
    throw ShapeMismatch("mode-" + std::to_string(mode) +
                        " vector product needs length " + std::to_string(qn) +
                        ", got " + std::to_string(x.size()));
  }
  switch (mode) {
    case 1: {
      Eigen::MatrixXd out = Eigen::MatrixXd::Zero(t.dim2(), t.dim3());
      for (Eigen::Index i = 0; i < qn; ++i) out += x[i] * t.slice1(i);
      return out;
    }
    case 2: {
      Eigen::MatrixXd out = Eigen::MatrixXd::Zero(t.dim1(), t.dim3());
      for (Eigen::Index j = 0; j < qn; ++j) out += x[j] * t.slice2(j);
      return out;
    }
    default: {
      Eigen::MatrixXd out = Eigen::MatrixXd::Zero(t.dim1(), t.dim2());
      for (Eigen::Index k = 0; k < qn; ++k) out += x[k] * t.slice3(k);
      return out;
    }
  }
}

// Tucker operator [[T; X1, X2, X3]] = ((T x3 X3) x2 X2) x1 X1. The mode
// products commute, so the evaluation order does not matter.
inline Tensor3 tucker(const Tensor3& t, const Eigen::MatrixXd& x1,
                      const Eigen::MatrixXd& x2, const Eigen::MatrixXd& x3) {
  return mode_product(mode_product(mode_product(t, x3, 3), x2, 2), x1, 1);
}

// [[T; X1, z, w]] with vector arguments on modes 2 and 3; both axes are
// removed after the products, leaving a vector of length x1.rows().
inline Eigen::VectorXd tucker_vector(const Tensor3& t, const Eigen::MatrixXd& x1,
                                     const Eigen::VectorXd& z,
                                     const Eigen::VectorXd& w) {
  if (x1.cols() != t.dim1()) {
    throw ShapeMismatch("tucker_vector: mode-1 factor needs " +
                        std::to_string(t.dim1()) + " columns");
  }
  return x1 * (mode_vec_product(t, w, 3) * z);
}

// Fully contracted [[T; p, z, w]].
inline double tucker_scalar(const Tensor3& t, const Eigen::VectorXd& p,
                            const Eigen::VectorXd& z, const Eigen::VectorXd& w) {
  if (p.size() != t.dim1()) {
    throw ShapeMismatch("tucker_scalar: mode-1 vector needs length " +
                        std::to_string(t.dim1()));
  }
  return p.dot(mode_vec_product(t, w, 3) * z);
}

// Tensor Kronecker square: the mode-1 slices of T (x) T are the Kronecker
// products of the mode-1 slices of T,
//   [T x T]_{(i + j*q1)::} = [T]_{j::} (x) [T]_{i::}   (0-based i, j),
// and the same outer/inner index convention holds along modes 2 and 3.
inline Tensor3 tensor_kron(const Tensor3& t) {
  const Eigen::Index q1 = t.dim1(), q2 = t.dim2(), q3 = t.dim3();
  Tensor3 out(q1 * q1, q2 * q2, q3 * q3);
  for (Eigen::Index j = 0; j < q1; ++j) {
    const Eigen::MatrixXd sj = t.slice1(j);
    for (Eigen::Index i = 0; i < q1; ++i) {
      const Eigen::MatrixXd prod = kron(sj, t.slice1(i));
      const Eigen::Index r = i + j * q1;
      for (Eigen::Index c = 0; c < q3 * q3; ++c) {
        for (Eigen::Index b = 0; b < q2 * q2; ++b) out(r, b, c) = prod(b, c);
      }
    }
  }
  return out;
}

// Symmetrized tensor Kronecker square
//   T (*) T = [[T x T; Q_{q1}, Q_{q2}, Q_{q3}]],
// of dimensions (sd(q1), sd(q2), sd(q3)).
inline Tensor3 tensor_skron(const Tensor3& t) {
  return tucker(tensor_kron(t), qd_matrix(t.dim1()), qd_matrix(t.dim2()),
                qd_matrix(t.dim3()));
}

// Lower bound on the tensor spectral norm sup { [[T; x, z, w]] : unit x,z,w }
// by alternating maximization from random restarts: with two vectors fixed,
// the optimal third is a normalized contraction, so the objective is
// nondecreasing along the iteration. Restarts use substreams of the seed in
// order, which makes the bound nondecreasing in the restart count.
inline double tensor_spectral_norm_lb(const Tensor3& t, int iters = 100,
                                      int restarts = 8,
                                      std::uint64_t seed = 0) {
  if (iters < 1 || restarts < 1) {
    throw Error("tensor_spectral_norm_lb requires iters, restarts >= 1");
  }
  double best = 0.0;
  for (int r = 0; r < restarts; ++r) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r));
    Eigen::VectorXd x = rng.unit_sphere(t.dim1());
    Eigen::VectorXd z = rng.unit_sphere(t.dim2());
    Eigen::VectorXd w = rng.unit_sphere(t.dim3());
    double value = 0.0;
    for (int it = 0; it < iters; ++it) {
      Eigen::MatrixXd tw = mode_vec_product(t, w, 3);  // q1 x q2
      Eigen::VectorXd xv = tw * z;
      double nx = xv.norm();
      if (nx < 1e-150) break;
      x = xv / nx;
      Eigen::VectorXd zv = tw.transpose() * x;
      double nz = zv.norm();
      if (nz < 1e-150) break;
      z = zv / nz;
      Eigen::VectorXd wv = mode_vec_product(t, x, 1).transpose() * z;
      double nw = wv.norm();
      if (nw < 1e-150) break;
      w = wv / nw;
      value = tucker_scalar(t, x, z, w);
    }
    if (value > best) best = value;
  }
  return best;
}

}  // namespace mnlqr

#endif  // MNLQR_TENSOR_HPP_
