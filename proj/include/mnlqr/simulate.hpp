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

#ifndef MNLQR_SIMULATE_HPP_
#define MNLQR_SIMULATE_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include "mnlqr/errors.hpp"
#include "mnlqr/identify.hpp"
#include "mnlqr/model.hpp"
#include "mnlqr/rng.hpp"
#include "mnlqr/symm.hpp"

namespace mnlqr {

// Uniform sample from the solid ball { w : ||w - center|| <= radius }.
inline Eigen::VectorXd sample_ball(const Eigen::VectorXd& center, double radius,
                                   Rng& rng) {
  if (radius < 0.0) throw Error("ball radius must be nonnegative");
  if (radius == 0.0) return center;
  return center + rng.ball(center.size(), radius);
}

// Disturbance distributions used by the experiments. Both kinds expose their
// analytic second moment, the mean and a hard norm bound.
class DisturbanceSampler {
 public:
  enum class Kind { kUniformBall, kFixedFirstCoordEllipsoid };

  static DisturbanceSampler uniform_ball(Eigen::VectorXd center, double radius) {
    if (radius < 0.0) throw Error("ball radius must be nonnegative");
    DisturbanceSampler s;
    s.kind_ = Kind::kUniformBall;
    s.center_ = std::move(center);
    s.radius_ = radius;
    return s;
  }

  // First coordinate pinned to one, the rest uniform on the centered
  // ellipsoid surface scaled so that E[w w^T] = diag(scales). Requires
  // scales[0] == 1.
  static DisturbanceSampler fixed_first_coord_ellipsoid(Eigen::VectorXd scales) {
    if (scales.size() < 2) {
      throw Error("ellipsoid sampler needs at least two coordinates");
    }
    if (std::abs(scales[0] - 1.0) > 1e-12) {
      throw Error("scales[0] must equal 1 (the pinned coordinate)");
    }
    for (Eigen::Index i = 1; i < scales.size(); ++i) {
      if (scales[i] < 0.0) throw Error("scales must be nonnegative");
    }
    DisturbanceSampler s;
    s.kind_ = Kind::kFixedFirstCoordEllipsoid;
    s.center_ = std::move(scales);
    return s;
  }

  Kind kind() const { return kind_; }
  Eigen::Index dim() const { return center_.size(); }

  Eigen::VectorXd sample(Rng& rng) const {
    if (kind_ == Kind::kUniformBall) return sample_ball(center_, radius_, rng);
    const Eigen::Index free = center_.size() - 1;
    Eigen::VectorXd u = rng.unit_sphere(free);
    Eigen::VectorXd w(center_.size());
    w[0] = 1.0;
    for (Eigen::Index i = 0; i < free; ++i) {
      w[i + 1] = std::sqrt(static_cast<double>(free) * center_[i + 1]) * u[i];
    }
    return w;
  }

  // Hard bound on ||w||.
  double norm_bound() const {
    if (kind_ == Kind::kUniformBall) return center_.norm() + radius_;
    double acc = 1.0;
    double smax = 0.0;
    for (Eigen::Index i = 1; i < center_.size(); ++i) {
      smax = std::max(smax, center_[i]);
    }
    return std::sqrt(acc + static_cast<double>(center_.size() - 1) * smax);
  }

  Eigen::VectorXd mean() const {
    if (kind_ == Kind::kUniformBall) return center_;
    Eigen::VectorXd m = Eigen::VectorXd::Zero(center_.size());
    m[0] = 1.0;
    return m;
  }

  // E[w w^T]; for the uniform ball this is r^2 I / (n + 2) + mu mu^T.
  SymMat second_moment() const {
    const Eigen::Index n = center_.size();
    if (kind_ == Kind::kUniformBall) {
      Eigen::MatrixXd w =
          (radius_ * radius_ / static_cast<double>(n + 2)) *
              Eigen::MatrixXd::Identity(n, n) +
          center_ * center_.transpose();
      return SymMat(w, 1e-9);
    }
    return SymMat(Eigen::MatrixXd(center_.asDiagonal()), 1e-9);
  }

  // Covariance E[(w - mu)(w - mu)^T].
  SymMat covariance() const {
    const Eigen::Index n = center_.size();
    if (kind_ == Kind::kUniformBall) {
      return SymMat(
          (radius_ * radius_ / static_cast<double>(n + 2)) *
              Eigen::MatrixXd::Identity(n, n),
          1e-9);
    }
    Eigen::MatrixXd cov = Eigen::MatrixXd(center_.asDiagonal());
    cov(0, 0) = 0.0;
    return SymMat(cov, 1e-9);
  }

  // Zero-dimensional placeholder; replaced before use.
  DisturbanceSampler() = default;

 private:
  Kind kind_ = Kind::kUniformBall;
  Eigen::VectorXd center_;  // scales for the ellipsoid kind
  double radius_ = 0.0;
};

namespace detail {

// Structured models receive disturbances as (1, w~).
inline Eigen::VectorXd draw_disturbance(const ModeTensor& truth,
                                        const DisturbanceSampler& sampler,
                                        Rng& rng) {
  Eigen::VectorXd w = sampler.sample(rng);
  if (!truth.structured()) return w;
  Eigen::VectorXd full(w.size() + 1);
  full[0] = 1.0;
  full.tail(w.size()) = w;
  return full;
}

}  // namespace detail

// N independent pairs (z_i, x_{i+1}): each z_i is drawn fresh from z_sampler
// and propagated one step.
inline Dataset gen_repeated_init(const ModeTensor& truth,
                                 const DisturbanceSampler& sampler,
                                 const DisturbanceSampler& z_sampler,
                                 Eigen::Index n, Rng rng,
                                 std::uint64_t seed_label = 0) {
  if (z_sampler.dim() != truth.nz()) {
    throw DimensionMismatch("z sampler dimension must be n_z");
  }
  Dataset data;
  data.generation = Generation::kRepeatedInit;
  data.r_w = sampler.norm_bound();
  data.r_z = z_sampler.norm_bound();
  data.seed = seed_label;
  data.z.reserve(n);
  data.x_next.reserve(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd z = z_sampler.sample(rng);
    Eigen::VectorXd w = detail::draw_disturbance(truth, sampler, rng);
    data.x_next.push_back(step(truth, z, w));
    data.z.push_back(std::move(z));
  }
  return data;
}

namespace detail {

// One excited rollout visiting states x_0 .. x_{T-1}; the final transition
// ((x_{T-2}, u_{T-2}), x_{T-1}) is the usable sample.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> rollout_tail(
    const ModeTensor& truth, const DisturbanceSampler& sampler,
    const Eigen::VectorXd& x0, const Eigen::MatrixXd& k_exc,
    double delta_radius, int t_len, Rng& rng, double blowup_cap) {
  Eigen::VectorXd x = x0;
  Eigen::VectorXd z_tail;
  for (int t = 0; t + 1 < t_len; ++t) {
    Eigen::VectorXd u = k_exc * x;
    if (delta_radius > 0.0) u += rng.ball(truth.nu(), delta_radius);
    Eigen::VectorXd z(truth.nz());
    z.head(truth.nx()) = x;
    z.tail(truth.nu()) = u;
    Eigen::VectorXd w = draw_disturbance(truth, sampler, rng);
    x = step(truth, z, w);
    if (!x.allFinite() || x.norm() > blowup_cap) {
      throw TrajectoryBlowup("rollout state norm exceeded " +
                             std::to_string(blowup_cap));
    }
    z_tail = std::move(z);
  }
  return {std::move(z_tail), std::move(x)};
}

}  // namespace detail

// N independent rollouts of length T (states); only the tail transition of
// each is kept, so the pairs are i.i.d. across rollouts.
inline Dataset gen_rollout(const ModeTensor& truth,
                           const DisturbanceSampler& sampler,
                           const Eigen::VectorXd& x0,
                           const Eigen::MatrixXd& k_exc, double delta_radius,
                           int t_len, Eigen::Index n, Rng rng,
                           std::uint64_t seed_label = 0,
                           double blowup_cap = 1e9) {
  if (t_len < 2) throw Error("rollout length must be at least 2");
  if (x0.size() != truth.nx() || k_exc.rows() != truth.nu() ||
      k_exc.cols() != truth.nx()) {
    throw DimensionMismatch("rollout shapes do not match the model");
  }
  Dataset data;
  data.generation = Generation::kRollout;
  data.rollout_length = t_len;
  data.r_w = sampler.norm_bound();
  data.seed = seed_label;
  for (Eigen::Index i = 0; i < n; ++i) {
    auto [z, x] = detail::rollout_tail(truth, sampler, x0, k_exc, delta_radius,
                                       t_len, rng, blowup_cap);
    data.z.push_back(std::move(z));
    data.x_next.push_back(std::move(x));
  }
  return data;
}

// All consecutive pairs of a single excited trajectory. The samples are not
// independent, so downstream radii are marked uncertified.
inline Dataset gen_single_trajectory(const ModeTensor& truth,
                                     const DisturbanceSampler& sampler,
                                     const Eigen::VectorXd& x0,
                                     const Eigen::MatrixXd& k_exc,
                                     double delta_radius, Eigen::Index n,
                                     Rng rng, std::uint64_t seed_label = 0,
                                     double blowup_cap = 1e9) {
  if (n < 1) throw Error("single trajectory needs at least one transition");
  if (x0.size() != truth.nx() || k_exc.rows() != truth.nu() ||
      k_exc.cols() != truth.nx()) {
    throw DimensionMismatch("trajectory shapes do not match the model");
  }
  Dataset data;
  data.generation = Generation::kSingleTrajectory;
  data.r_w = sampler.norm_bound();
  data.seed = seed_label;
  Eigen::VectorXd x = x0;
  for (Eigen::Index t = 0; t < n; ++t) {
    Eigen::VectorXd u = k_exc * x;
    if (delta_radius > 0.0) u += rng.ball(truth.nu(), delta_radius);
    Eigen::VectorXd z(truth.nz());
    z.head(truth.nx()) = x;
    z.tail(truth.nu()) = u;
    Eigen::VectorXd w = detail::draw_disturbance(truth, sampler, rng);
    x = step(truth, z, w);
    if (!x.allFinite() || x.norm() > blowup_cap) {
      throw TrajectoryBlowup("trajectory state norm exceeded " +
                             std::to_string(blowup_cap));
    }
    data.z.push_back(std::move(z));
    data.x_next.push_back(x);
  }
  return data;
}

}  // namespace mnlqr

#endif  // MNLQR_SIMULATE_HPP_
