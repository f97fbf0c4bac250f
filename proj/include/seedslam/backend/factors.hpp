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

#include <cmath>
#include <limits>

#include <Eigen/Core>

#include "seedslam/core/types.hpp"
#include "seedslam/geometry/stereo.hpp"

namespace seedslam::backend {

using Mat36 = Eigen::Matrix<double, 3, 6>;
using Mat66 = Eigen::Matrix<double, 6, 6>;

// Pose tangent vectors are ordered (omega, v) and applied on the right: P * Exp(xi).

/// IRLS weight of the Huber loss: 1 inside the quadratic region, k / |r| outside.
inline double huber_weight(double residual_norm, double k) {
  if (!(residual_norm > k)) return 1.0;
  return k / residual_norm;
}

/// Huber loss on a residual norm: r^2 / 2 for r <= k, k r - k^2 / 2 beyond.
inline double huber_loss(double residual_norm, double k) {
  if (!(residual_norm > k)) return 0.5 * residual_norm * residual_norm;
  return k * residual_norm - 0.5 * k * k;
}

inline double huber_loss_derivative(double residual_norm, double k) {
  return residual_norm > k ? k : residual_norm;
}

/// Stereo reprojection residual (x, u_right, y) in pixels; throws if the landmark is
/// behind the camera.
inline Vec3 stereo_residual(const PoseSE3& pose, const Vec3& landmark_world,
                            const StereoMeasurement& measured, const CameraRig& rig) {
  const Vec3 pc = pose.inverse_transform(landmark_world);
  return geometry::project(pc, rig).as_vector() - measured.as_vector();
}

struct StereoJacobians {
  Mat36 d_pose;
  Mat3 d_landmark;
};

/// Analytic Jacobians of stereo_residual. Requires the camera-frame depth to be positive.
inline StereoJacobians stereo_jacobians(const PoseSE3& pose, const Vec3& landmark_world,
                                        const CameraRig& rig) {
  const Vec3 pc = pose.inverse_transform(landmark_world);
  const double iz = 1.0 / pc.z();
  const double f = rig.f;
  Mat3 dproj;
  dproj << f * iz, 0.0, -f * pc.x() * iz * iz,                    //
      f * iz, 0.0, -f * (pc.x() - rig.baseline_m) * iz * iz,      //
      0.0, f * iz, -f * pc.y() * iz * iz;
  StereoJacobians j;
  j.d_pose.leftCols<3>() = dproj * so3::hat(pc);
  j.d_pose.rightCols<3>() = -dproj;
  j.d_landmark = dproj * pose.rotation.transpose();
  return j;
}

/// Relative-motion residual between consecutive camera-to-world poses: rotation error
/// Log(Rm^T Ri^T Rj) and translation error Ri^T (tj - ti) - tm, expressed in frame i.
inline Vec6 motion_residual(const PoseSE3& pi, const PoseSE3& pj, const PoseSE3& measured) {
  Vec6 r;
  r.head<3>() = so3::log(measured.rotation.transpose() * pi.rotation.transpose() * pj.rotation);
  r.tail<3>() = pi.rotation.transpose() * (pj.translation - pi.translation) - measured.translation;
  return r;
}

struct MotionJacobians {
  Mat66 d_from;
  Mat66 d_to;
};

inline MotionJacobians motion_jacobians(const PoseSE3& pi, const PoseSE3& pj, const PoseSE3& measured) {
  const Vec3 rot_err =
      so3::log(measured.rotation.transpose() * pi.rotation.transpose() * pj.rotation);
  const Mat3 jr_inv = so3::right_jacobian_inverse(rot_err);
  const Mat3 rel_rot = pi.rotation.transpose() * pj.rotation;
  const Vec3 rel_t = pi.rotation.transpose() * (pj.translation - pi.translation);

  MotionJacobians j;
  j.d_from.setZero();
  j.d_to.setZero();
  j.d_from.block<3, 3>(0, 0) = -jr_inv * rel_rot.transpose();
  j.d_to.block<3, 3>(0, 0) = jr_inv;
  j.d_from.block<3, 3>(3, 0) = so3::hat(rel_t);
  j.d_from.block<3, 3>(3, 3) = -Mat3::Identity();
  j.d_to.block<3, 3>(3, 3) = rel_rot;
  return j;
}

/// Square-root information of the motion prior: isotropic on rotation, `along` on the
/// motion direction and `perp` across it.
inline Mat66 motion_sqrt_information(double sigma_rot, double sigma_along, double sigma_perp,
                                     const Vec3& direction) {
  const Vec3 d = direction.normalized();
  const Mat3 along = d * d.transpose();
  Mat66 w = Mat66::Zero();
  w.block<3, 3>(0, 0) = Mat3::Identity() / sigma_rot;
  w.block<3, 3>(3, 3) = along / sigma_along + (Mat3::Identity() - along) / sigma_perp;
  return w;
}

}  // namespace seedslam::backend
