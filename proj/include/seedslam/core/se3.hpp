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

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace seedslam {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;

namespace so3 {

inline Mat3 hat(const Vec3& w) {
  Mat3 m;
  m << 0.0, -w.z(), w.y(),  //
      w.z(), 0.0, -w.x(),   //
      -w.y(), w.x(), 0.0;
  return m;
}

inline Mat3 exp(const Vec3& w) {
  const double theta = w.norm();
  if (theta < 1e-12) return Mat3::Identity() + hat(w);
  return Eigen::AngleAxisd(theta, w / theta).toRotationMatrix();
}

inline Vec3 log(const Mat3& r) {
  const Eigen::AngleAxisd aa(r);
  return aa.angle() * aa.axis();
}

/// Inverse of the right Jacobian: d Log(Exp(phi) Exp(d)) / d d at d = 0.
inline Mat3 right_jacobian_inverse(const Vec3& phi) {
  const double theta = phi.norm();
  const Mat3 k = hat(phi);
  if (theta < 1e-6) return Mat3::Identity() + 0.5 * k + (1.0 / 12.0) * k * k;
  const double coeff =
      1.0 / (theta * theta) - (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  return Mat3::Identity() + 0.5 * k + coeff * k * k;
}

}  // namespace so3

/// Rigid camera pose. Poses stored by the pipeline map camera coordinates to world
/// coordinates (x_world = R * x_cam + t).
struct PoseSE3 {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static PoseSE3 identity() { return {}; }

  static PoseSE3 from_translation(const Vec3& t) { return {Mat3::Identity(), t}; }

  /// Exponential map of a tangent vector ordered (omega, v).
  static PoseSE3 exp(const Vec6& xi) {
    const Vec3 w = xi.head<3>();
    const Vec3 v = xi.tail<3>();
    const double theta = w.norm();
    const Mat3 k = so3::hat(w);
    Mat3 jl;
    if (theta < 1e-8) {
      jl = Mat3::Identity() + 0.5 * k + (1.0 / 6.0) * k * k;
    } else {
      const double t2 = theta * theta;
      jl = Mat3::Identity() + ((1.0 - std::cos(theta)) / t2) * k +
           ((theta - std::sin(theta)) / (t2 * theta)) * k * k;
    }
    return {so3::exp(w), jl * v};
  }

  PoseSE3 inverse() const {
    const Mat3 rt = rotation.transpose();
    return {rt, -rt * translation};
  }

  Vec3 transform(const Vec3& p) const { return rotation * p + translation; }
  Vec3 inverse_transform(const Vec3& p) const { return rotation.transpose() * (p - translation); }

  /// Right-perturbation retraction used by the optimizer: this * Exp(xi).
  PoseSE3 retract(const Vec6& xi) const;

  Eigen::Quaterniond quaternion() const { return Eigen::Quaterniond(rotation).normalized(); }

  bool is_valid(double tol = 1e-9) const {
    if (!rotation.allFinite() || !translation.allFinite()) return false;
    const Mat3 err = rotation.transpose() * rotation - Mat3::Identity();
    return err.cwiseAbs().maxCoeff() <= tol && std::abs(rotation.determinant() - 1.0) <= tol;
  }
};

/// a * b: rotation a.R * b.R, translation a.R * b.t + a.t.
inline PoseSE3 compose(const PoseSE3& a, const PoseSE3& b) {
  return {a.rotation * b.rotation, a.rotation * b.translation + a.translation};
}

inline PoseSE3 operator*(const PoseSE3& a, const PoseSE3& b) { return compose(a, b); }

inline PoseSE3 PoseSE3::retract(const Vec6& xi) const { return compose(*this, exp(xi)); }

inline PoseSE3 inverse(const PoseSE3& p) { return p.inverse(); }

inline PoseSE3 pose_from_quaternion(const Vec3& t, double qx, double qy, double qz, double qw) {
  Eigen::Quaterniond q(qw, qx, qy, qz);
  q.normalize();
  return {q.toRotationMatrix(), t};
}

}  // namespace seedslam
