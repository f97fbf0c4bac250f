/******************************************************************************
 * Copyright 2026 The seedslam Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "seedslam/backend/config.hpp"
#include "seedslam/backend/factor_graph.hpp"
#include "seedslam/backend/factors.hpp"
#include "seedslam/core/errors.hpp"

namespace seedslam::backend {

struct OptimizationResult {
  std::vector<PoseSE3> poses;
  /// Indexed like FactorGraph::landmark_values().
  std::vector<Vec3> landmarks;
  std::vector<LandmarkId> landmark_ids;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  /// Robust cost at the start and after every accepted step.
  std::vector<double> cost_history;
  int iterations = 0;
  bool converged = false;
  /// Stereo factors skipped in the last linearization because the point was behind the camera.
  std::size_t deactivated_factors = 0;
};

/// Raised for singular normal equations or a non-finite cost. Carries the last good state.
class OptimizerError : public Error {
 public:
  enum class Kind { Singular, Divergence };

  OptimizerError(Kind kind, const std::string& what, std::vector<PoseSE3> poses,
                 std::vector<Vec3> landmarks)
      : Error(what), kind_(kind), poses_(std::move(poses)), landmarks_(std::move(landmarks)) {}

  Kind kind() const { return kind_; }
  const std::vector<PoseSE3>& last_good_poses() const { return poses_; }
  const std::vector<Vec3>& last_good_landmarks() const { return landmarks_; }

 private:
  Kind kind_;
  std::vector<PoseSE3> poses_;
  std::vector<Vec3> landmarks_;
};

namespace detail {

using Mat63 = Eigen::Matrix<double, 6, 3>;

/// Minimum camera-frame depth for a stereo factor to be evaluated.
inline constexpr double kMinFactorDepth = 1e-6;

struct State {
  std::vector<PoseSE3> poses;
  std::vector<Vec3> landmarks;
};

struct StereoLin {
  Mat36 j_pose;
  Mat3 j_landmark;
  Vec3 error;  // whitened
  double weight = 0.0;
  bool active = false;
};

struct MotionLin {
  Mat66 j_from;
  Mat66 j_to;
  Vec6 error;  // whitened
};

struct Step {
  Eigen::VectorXd poses;      // 6 per free pose
  Eigen::VectorXd landmarks;  // 3 per landmark

  double squared_norm() const { return poses.squaredNorm() + landmarks.squaredNorm(); }
  double norm() const { return std::sqrt(squared_norm()); }
};

/// Normal equations of the robustified problem, reduced over landmarks by Schur complement.
/// Pose 0 is excluded from the unknowns.
class Problem {
 public:
  Problem(const FactorGraph& g, const BackendConfig& cfg)
      : graph_(g), cfg_(cfg), n_free_(g.num_poses() > 0 ? g.num_poses() - 1 : 0),
        n_landmarks_(g.num_landmarks()) {
    motion_sqrt_info_ = motion_sqrt_information(cfg.motion_sigma_rot, cfg.motion_sigma_along,
                                                cfg.motion_sigma_perp, g.motion_direction());
    by_landmark_.assign(n_landmarks_, {});
    const auto& sf = g.stereo_factors();
    for (std::size_t i = 0; i < sf.size(); ++i) by_landmark_[sf[i].landmark_slot].push_back(i);
  }

  std::size_t free_poses() const { return n_free_; }

  double stereo_loss(double whitened_norm) const {
    return std::isinf(cfg_.huber_k) ? 0.5 * whitened_norm * whitened_norm
                                    : huber_loss(whitened_norm, cfg_.huber_k);
  }

  double cost(const State& s, std::size_t* deactivated = nullptr) const {
    double total = 0.0;
    std::size_t off = 0;
    const CameraRig& rig = graph_.rig();
    for (const auto& f : graph_.stereo_factors()) {
      const Vec3 pc = s.poses[f.pose].inverse_transform(s.landmarks[f.landmark_slot]);
      if (!(pc.z() > kMinFactorDepth)) {
        ++off;
        continue;
      }
      const Vec3 e = (geometry::project(pc, rig).as_vector() - f.measured.as_vector()) / cfg_.pixel_sigma;
      total += stereo_loss(e.norm());
    }
    for (const auto& m : graph_.motion_factors()) {
      const Vec6 e = motion_sqrt_info_ * motion_residual(s.poses[m.from], s.poses[m.to], m.measured);
      total += 0.5 * e.squaredNorm();
    }
    if (deactivated) *deactivated = off;
    return total;
  }

  /// Cost of a trial state. A step that pushes more points behind their cameras than the
  /// current linearization would shed those factors' cost for free, so it is rejected.
  double trial_cost(const State& s) const {
    std::size_t off = 0;
    const double c = cost(s, &off);
    return off > deactivated_ ? std::numeric_limits<double>::infinity() : c;
  }

  /// Evaluates Jacobians, IRLS weights and the gradient at `s`. Returns the cost.
  double linearize(const State& s) {
    const CameraRig& rig = graph_.rig();
    const auto& sf = graph_.stereo_factors();
    const auto& mf = graph_.motion_factors();
    stereo_.resize(sf.size());
    motion_.resize(mf.size());
    grad_poses_ = Eigen::VectorXd::Zero(6 * n_free_);
    grad_landmarks_ = Eigen::VectorXd::Zero(3 * n_landmarks_);
    deactivated_ = 0;
    double total = 0.0;

    for (std::size_t i = 0; i < sf.size(); ++i) {
      const auto& f = sf[i];
      StereoLin& lin = stereo_[i];
      const PoseSE3& pose = s.poses[f.pose];
      const Vec3& lm = s.landmarks[f.landmark_slot];
      const Vec3 pc = pose.inverse_transform(lm);
      if (!(pc.z() > kMinFactorDepth)) {
        lin.active = false;
        ++deactivated_;
        continue;
      }
      lin.active = true;
      lin.error = (geometry::project(pc, rig).as_vector() - f.measured.as_vector()) / cfg_.pixel_sigma;
      const StereoJacobians j = stereo_jacobians(pose, lm, rig);
      lin.j_pose = j.d_pose / cfg_.pixel_sigma;
      lin.j_landmark = j.d_landmark / cfg_.pixel_sigma;
      const double nrm = lin.error.norm();
      lin.weight = std::isinf(cfg_.huber_k) ? 1.0 : huber_weight(nrm, cfg_.huber_k);
      total += stereo_loss(nrm);

      if (f.pose > 0) grad_poses_.segment<6>(6 * (f.pose - 1)) += lin.weight * lin.j_pose.transpose() * lin.error;
      grad_landmarks_.segment<3>(3 * f.landmark_slot) += lin.weight * lin.j_landmark.transpose() * lin.error;
    }

    for (std::size_t i = 0; i < mf.size(); ++i) {
      const auto& m = mf[i];
      MotionLin& lin = motion_[i];
      const PoseSE3& pi = s.poses[m.from];
      const PoseSE3& pj = s.poses[m.to];
      lin.error = motion_sqrt_info_ * motion_residual(pi, pj, m.measured);
      const MotionJacobians j = motion_jacobians(pi, pj, m.measured);
      lin.j_from = motion_sqrt_info_ * j.d_from;
      lin.j_to = motion_sqrt_info_ * j.d_to;
      total += 0.5 * lin.error.squaredNorm();
      if (m.from > 0) grad_poses_.segment<6>(6 * (m.from - 1)) += lin.j_from.transpose() * lin.error;
      if (m.to > 0) grad_poses_.segment<6>(6 * (m.to - 1)) += lin.j_to.transpose() * lin.error;
    }
    return total;
  }

  double gradient_squared_norm() const {
    return grad_poses_.squaredNorm() + grad_landmarks_.squaredNorm();
  }

  Step negative_gradient() const { return {-grad_poses_, -grad_landmarks_}; }

  double gradient_dot(const Step& h) const {
    return grad_poses_.dot(h.poses) + grad_landmarks_.dot(h.landmarks);
  }

  /// h^T H h for the undamped Gauss-Newton Hessian.
  double hessian_quadratic(const Step& h) const {
    double q = 0.0;
    const auto& sf = graph_.stereo_factors();
    for (std::size_t i = 0; i < sf.size(); ++i) {
      const StereoLin& lin = stereo_[i];
      if (!lin.active) continue;
      Vec3 jh = lin.j_landmark * h.landmarks.segment<3>(3 * sf[i].landmark_slot);
      if (sf[i].pose > 0) jh += lin.j_pose * h.poses.segment<6>(6 * (sf[i].pose - 1));
      q += lin.weight * jh.squaredNorm();
    }
    const auto& mf = graph_.motion_factors();
    for (std::size_t i = 0; i < mf.size(); ++i) {
      Vec6 jh = Vec6::Zero();
      if (mf[i].from > 0) jh += motion_[i].j_from * h.poses.segment<6>(6 * (mf[i].from - 1));
      if (mf[i].to > 0) jh += motion_[i].j_to * h.poses.segment<6>(6 * (mf[i].to - 1));
      q += jh.squaredNorm();
    }
    return q;
  }

  /// Solves (H + lambda * diag(H)) h = -g through the reduced camera system.
  Step solve(double lambda, const State& s) const {
    const auto& sf = graph_.stereo_factors();
    const auto& mf = graph_.motion_factors();
    const std::size_t np = 6 * n_free_;
    Eigen::MatrixXd reduced = Eigen::MatrixXd::Zero(np, np);
    Eigen::VectorXd rhs = -grad_poses_;

    auto add_pose_block = [&](std::size_t a, std::size_t b, const Mat66& m) {
      reduced.block<6, 6>(6 * a, 6 * b) += m;
    };

    for (std::size_t i = 0; i < mf.size(); ++i) {
      const auto& m = mf[i];
      const auto& lin = motion_[i];
      if (m.from > 0) add_pose_block(m.from - 1, m.from - 1, lin.j_from.transpose() * lin.j_from);
      if (m.to > 0) add_pose_block(m.to - 1, m.to - 1, lin.j_to.transpose() * lin.j_to);
      if (m.from > 0 && m.to > 0) {
        const Mat66 cross = lin.j_from.transpose() * lin.j_to;
        add_pose_block(m.from - 1, m.to - 1, cross);
        add_pose_block(m.to - 1, m.from - 1, cross.transpose());
      }
    }

    // Per-landmark blocks, kept for back-substitution.
    std::vector<Mat3> hll(n_landmarks_, Mat3::Zero());
    std::vector<Mat63> hpl(sf.size());
    for (std::size_t l = 0; l < n_landmarks_; ++l) {
      for (std::size_t fi : by_landmark_[l]) {
        const StereoLin& lin = stereo_[fi];
        if (!lin.active) continue;
        hll[l] += lin.weight * lin.j_landmark.transpose() * lin.j_landmark;
        if (sf[fi].pose > 0) {
          const std::size_t p = sf[fi].pose - 1;
          add_pose_block(p, p, lin.weight * lin.j_pose.transpose() * lin.j_pose);
          hpl[fi] = lin.weight * lin.j_pose.transpose() * lin.j_landmark;
        }
      }
    }
    if (lambda > 0.0) {
      for (std::size_t i = 0; i < np; ++i) reduced(i, i) += lambda * std::max(reduced(i, i), 1e-9);
    }

    std::vector<Mat3> hll_inv(n_landmarks_);
    Mat63 y;
    for (std::size_t l = 0; l < n_landmarks_; ++l) {
      Mat3 block = hll[l];
      if (block.isZero(0.0)) {
        // Every factor of this landmark is deactivated: hold it for this step.
        hll_inv[l].setZero();
        continue;
      }
      if (lambda > 0.0) block.diagonal() += lambda * block.diagonal().cwiseMax(1e-9);
      Eigen::LLT<Mat3> llt(block);
      if (llt.info() != Eigen::Success || !(block.diagonal().minCoeff() > 0.0)) {
        throw OptimizerError(OptimizerError::Kind::Singular,
                             "singular normal equations: landmark " +
                                 std::to_string(graph_.landmark_ids()[l]) + " is under-constrained",
                             s.poses, s.landmarks);
      }
      hll_inv[l] = llt.solve(Mat3::Identity());
      const Vec3 gl = grad_landmarks_.segment<3>(3 * l);

      const auto& fl = by_landmark_[l];
      for (std::size_t a : fl) {
        if (!stereo_[a].active || sf[a].pose == 0) continue;
        y = hpl[a] * hll_inv[l];
        const std::size_t pa = sf[a].pose - 1;
        rhs.segment<6>(6 * pa) += y * gl;
        for (std::size_t b : fl) {
          if (!stereo_[b].active || sf[b].pose == 0) continue;
          const std::size_t pb = sf[b].pose - 1;
          if (pb > pa) continue;  // lower triangle only
          reduced.block<6, 6>(6 * pa, 6 * pb).noalias() -= y * hpl[b].transpose();
        }
      }
    }

    Step h;
    h.poses = Eigen::VectorXd::Zero(np);
    if (np > 0) {
      Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(reduced);
      if (llt.info() != Eigen::Success) {
        std::string who = "reduced camera system";
        for (std::size_t p = 0; p < n_free_; ++p) {
          Mat66 blk = reduced.block<6, 6>(6 * p, 6 * p);
          blk = blk.selfadjointView<Eigen::Lower>();
          if (Eigen::LLT<Mat66>(blk).info() != Eigen::Success) {
            who = "pose " + std::to_string(p + 1);
            break;
          }
        }
        throw OptimizerError(OptimizerError::Kind::Singular,
                             "singular normal equations: " + who + " is under-constrained", s.poses,
                             s.landmarks);
      }
      h.poses = llt.solve(rhs);
    }

    h.landmarks = Eigen::VectorXd::Zero(3 * n_landmarks_);
    for (std::size_t l = 0; l < n_landmarks_; ++l) {
      Vec3 b = -grad_landmarks_.segment<3>(3 * l);
      for (std::size_t fi : by_landmark_[l]) {
        if (!stereo_[fi].active || sf[fi].pose == 0) continue;
        b -= hpl[fi].transpose() * h.poses.segment<6>(6 * (sf[fi].pose - 1));
      }
      h.landmarks.segment<3>(3 * l) = hll_inv[l] * b;
    }
    if (!h.poses.allFinite() || !h.landmarks.allFinite()) {
      throw OptimizerError(OptimizerError::Kind::Divergence, "non-finite update step", s.poses,
                           s.landmarks);
    }
    return h;
  }

  State apply(const State& s, const Step& h) const {
    State out = s;
    for (std::size_t p = 1; p < out.poses.size(); ++p)
      out.poses[p] = s.poses[p].retract(h.poses.segment<6>(6 * (p - 1)));
    for (std::size_t l = 0; l < out.landmarks.size(); ++l) out.landmarks[l] += h.landmarks.segment<3>(3 * l);
    return out;
  }

  std::size_t deactivated() const { return deactivated_; }

 private:
  const FactorGraph& graph_;
  const BackendConfig& cfg_;
  std::size_t n_free_;
  std::size_t n_landmarks_;
  Mat66 motion_sqrt_info_;
  std::vector<std::vector<std::size_t>> by_landmark_;

  std::vector<StereoLin> stereo_;
  std::vector<MotionLin> motion_;
  Eigen::VectorXd grad_poses_;
  Eigen::VectorXd grad_landmarks_;
  std::size_t deactivated_ = 0;
};

inline Step scaled(const Step& h, double a) { return {a * h.poses, a * h.landmarks}; }

inline Step add(const Step& a, const Step& b) { return {a.poses + b.poses, a.landmarks + b.landmarks}; }

/// Dogleg combination of the Gauss-Newton and Cauchy steps inside `radius`.
inline Step dogleg_step(const Step& gn, const Step& cauchy, double radius) {
  const double gn_norm = gn.norm();
  if (gn_norm <= radius) return gn;
  const double c_norm = cauchy.norm();
  if (c_norm >= radius) return scaled(cauchy, radius / c_norm);
  // Solve |cauchy + beta (gn - cauchy)| = radius for beta in [0, 1].
  const Step d = add(gn, scaled(cauchy, -1.0));
  const double a = d.squared_norm();
  const double b = 2.0 * (cauchy.poses.dot(d.poses) + cauchy.landmarks.dot(d.landmarks));
  const double c = cauchy.squared_norm() - radius * radius;
  const double beta = (-b + std::sqrt(std::max(0.0, b * b - 4.0 * a * c))) / (2.0 * a);
  return add(cauchy, scaled(d, beta));
}

}  // namespace detail

/// Robust batch optimization of every pose and landmark in `graph`; the graph is not modified.
///
/// Stereo factors use the Huber loss through iteratively reweighted least squares, motion
/// factors are Gaussian, and pose 0 is held fixed as the gauge. Each linearization is solved by
/// Schur complement over the landmarks followed by a dense Cholesky of the reduced camera
/// system. Accepted steps never increase the robust cost.
inline OptimizationResult optimize(const FactorGraph& graph, const BackendConfig& cfg) {
  detail::State state{graph.poses(), graph.landmark_values()};
  detail::Problem problem(graph, cfg);

  OptimizationResult res;
  res.landmark_ids = graph.landmark_ids();

  double cost = problem.linearize(state);
  if (!std::isfinite(cost)) {
    throw OptimizerError(OptimizerError::Kind::Divergence, "initial cost is not finite",
                         state.poses, state.landmarks);
  }
  res.initial_cost = cost;
  res.cost_history.push_back(cost);

  constexpr double kAbsoluteCostFloor = 1e-24;
  double radius = cfg.initial_trust_radius;
  double lambda = 1e-5;
  bool fresh_linearization = true;

  for (int it = 0; it < cfg.max_iterations; ++it) {
    if (!fresh_linearization) cost = problem.linearize(state);
    fresh_linearization = false;
    res.iterations = it + 1;

    const double g2 = problem.gradient_squared_norm();
    if (cost <= kAbsoluteCostFloor || g2 <= 1e-30 || problem.free_poses() + graph.num_landmarks() == 0) {
      res.cost_history.push_back(cost);
      res.converged = true;
      break;
    }

    bool accepted = false;
    bool stalled = false;
    double new_cost = cost;
    detail::State trial;

    if (cfg.optimizer == OptimizerKind::Dogleg) {
      const detail::Step gn = problem.solve(0.0, state);
      const detail::Step sd = problem.negative_gradient();
      const double alpha = g2 / problem.hessian_quadratic(sd);
      const detail::Step cauchy = detail::scaled(sd, alpha);
      while (!accepted) {
        const detail::Step h = detail::dogleg_step(gn, cauchy, radius);
        const double step_norm = h.norm();
        if (step_norm <= 1e-15) {
          stalled = true;
          break;
        }
        const double model_decrease =
            -(problem.gradient_dot(h) + 0.5 * problem.hessian_quadratic(h));
        trial = problem.apply(state, h);
        new_cost = problem.trial_cost(trial);
        const double rho = model_decrease > 0.0 ? (cost - new_cost) / model_decrease : -1.0;
        if (std::isfinite(new_cost) && new_cost <= cost) accepted = true;
        if (std::isfinite(new_cost) && rho > cfg.gain_grow_threshold) {
          radius = std::min(radius * cfg.trust_grow, 1e12);
        } else if (!std::isfinite(new_cost) || rho < cfg.gain_shrink_threshold) {
          radius = std::min(radius, step_norm) * cfg.trust_shrink;
        }
        if (!accepted && radius < 1e-14) {
          stalled = true;
          break;
        }
      }
    } else {
      while (!accepted) {
        const detail::Step h = problem.solve(lambda, state);
        if (h.norm() <= 1e-15) {
          stalled = true;
          break;
        }
        trial = problem.apply(state, h);
        new_cost = problem.trial_cost(trial);
        if (std::isfinite(new_cost) && new_cost <= cost) {
          accepted = true;
          lambda = std::max(lambda / 10.0, 1e-12);
        } else {
          lambda *= 10.0;
          if (lambda > 1e16) {
            stalled = true;
            break;
          }
        }
      }
    }

    if (!accepted) {
      res.converged = stalled;
      break;
    }
    const double decrease = cost - new_cost;
    state = std::move(trial);
    res.cost_history.push_back(new_cost);
    const double previous = cost;
    cost = new_cost;
    if (decrease <= cfg.convergence_tol * previous || new_cost <= kAbsoluteCostFloor) {
      res.converged = true;
      break;
    }
  }

  std::size_t off = 0;
  res.final_cost = problem.cost(state, &off);
  res.deactivated_factors = off;
  if (!std::isfinite(res.final_cost)) {
    throw OptimizerError(OptimizerError::Kind::Divergence, "final cost is not finite", graph.poses(),
                         graph.landmark_values());
  }
  res.poses = std::move(state.poses);
  res.landmarks = std::move(state.landmarks);
  return res;
}

/// Root-mean-square stereo reprojection error in pixels over every evaluable factor.
inline double reprojection_rms(const FactorGraph& graph, std::span<const PoseSE3> poses,
                               std::span<const Vec3> landmarks) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& f : graph.stereo_factors()) {
    const Vec3 pc = poses[f.pose].inverse_transform(landmarks[f.landmark_slot]);
    if (!(pc.z() > detail::kMinFactorDepth)) continue;
    sum += (geometry::project(pc, graph.rig()).as_vector() - f.measured.as_vector()).squaredNorm();
    n += 3;
  }
  return n ? std::sqrt(sum / static_cast<double>(n)) : 0.0;
}

}  // namespace seedslam::backend
