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
#include <span>
#include <sstream>
#include <utility>
#include <vector>

#include "seedslam/core/errors.hpp"
#include "seedslam/core/types.hpp"

namespace seedslam::geometry {

struct IcpConfig {
  /// Prior direction of travel (unit vector); translations are projected onto it.
  Vec3 motion_direction = Vec3::UnitX();
  std::size_t min_correspondences = 10;
  double max_translation_m = 0.5;
  /// Stereo points outside this depth band are not used as 3D points.
  double min_depth_m = 0.3;
  double max_depth_m = 3.0;
  /// Temporal pairs whose 3D displacement strays from the median displacement by more than
  /// three robust standard deviations, clamped to [inlier_gate_min_m, inlier_gate_m], are
  /// treated as mismatches.
  double inlier_gate_m = 0.03;
  double inlier_gate_min_m = 0.002;

  void validate() const {
    if (!motion_direction.allFinite() || std::abs(motion_direction.norm() - 1.0) > 1e-9)
      throw ValidationError("icp.motion_direction: must be a unit vector");
    if (min_correspondences < 3) throw ValidationError("icp.min_correspondences: must be >= 3");
    if (!(max_translation_m > 0.0)) throw ValidationError("icp.max_translation_m: must be > 0");
    if (!(min_depth_m > 0.0 && max_depth_m > min_depth_m))
      throw ValidationError("icp.min_depth_m/max_depth_m: need 0 < min < max");
    if (!(inlier_gate_min_m > 0.0 && inlier_gate_m >= inlier_gate_min_m))
      throw ValidationError("icp.inlier_gate_m: need 0 < inlier_gate_min_m <= inlier_gate_m");
  }
};

using Correspondence = std::pair<std::size_t, std::size_t>;

/// Orthogonal projection of `t` onto the unit direction `dir`.
inline Vec3 project_onto_direction(const Vec3& t, const Vec3& dir) { return t.dot(dir) * dir; }

/// Sum of squared residuals |p_i + t - q_i|^2 over the correspondences.
inline double translation_error(const PointCloud3D& prev, const PointCloud3D& curr,
                                std::span<const Correspondence> corr, const Vec3& t) {
  double e = 0.0;
  for (const auto& [i, j] : corr) e += (prev.points[i] + t - curr.points[j]).squaredNorm();
  return e;
}

/// Closed-form minimizer of translation_error with the rotation held at identity:
/// the mean of q_i - p_i.
inline Vec3 best_translation(const PointCloud3D& prev, const PointCloud3D& curr,
                             std::span<const Correspondence> corr) {
  Vec3 sum = Vec3::Zero();
  for (const auto& [i, j] : corr) {
    if (i >= prev.size() || j >= curr.size())
      throw ContractViolation("correspondence index out of range");
    sum += curr.points[j] - prev.points[i];
  }
  return sum / static_cast<double>(corr.size());
}

/// Translation-only registration of two camera-frame clouds with known correspondences.
///
/// Returns the rigid transform mapping previous-frame coordinates onto current-frame
/// coordinates: rotation identity, translation = projection of the mean offset onto the
/// motion direction. The camera moves by the inverse of this transform, see camera_motion().
/// Throws TrackingFailure when there are too few pairs or the step exceeds the bound.
inline PoseSE3 estimate_relative_pose(const PointCloud3D& prev, const PointCloud3D& curr,
                                      std::span<const Correspondence> corr, const IcpConfig& cfg) {
  if (corr.size() < cfg.min_correspondences) {
    std::ostringstream msg;
    msg << "only " << corr.size() << " correspondences, need " << cfg.min_correspondences;
    throw TrackingFailure(FailureReason::TooFewMatches, msg.str());
  }
  const Vec3 t = project_onto_direction(best_translation(prev, curr, corr), cfg.motion_direction);
  if (t.norm() > cfg.max_translation_m) {
    std::ostringstream msg;
    msg << "frame-to-frame translation " << t.norm() << " m exceeds " << cfg.max_translation_m << " m";
    throw TrackingFailure(FailureReason::TranslationBound, msg.str());
  }
  return PoseSE3::from_translation(t);
}

/// Pairs whose displacement q - p lies close to the componentwise median displacement, in
/// input order. The radius is 3 * 1.4826 * median distance to the median, clamped to the
/// configured gate range.
inline std::vector<Correspondence> gate_correspondences(const PointCloud3D& prev, const PointCloud3D& curr,
                                                        std::span<const Correspondence> corr,
                                                        const IcpConfig& cfg) {
  if (corr.empty()) return {};
  std::vector<Vec3> disp;
  disp.reserve(corr.size());
  for (const auto& [i, j] : corr) {
    if (i >= prev.size() || j >= curr.size()) throw ContractViolation("correspondence index out of range");
    disp.push_back(curr.points[j] - prev.points[i]);
  }
  Vec3 median;
  std::vector<double> c(disp.size());
  for (int a = 0; a < 3; ++a) {
    for (std::size_t k = 0; k < disp.size(); ++k) c[k] = disp[k][a];
    const auto mid = c.begin() + static_cast<std::ptrdiff_t>(c.size() / 2);
    std::nth_element(c.begin(), mid, c.end());
    median[a] = *mid;
    if (c.size() % 2 == 0) median[a] = 0.5 * (median[a] + *std::max_element(c.begin(), mid));
  }
  std::vector<double> dev(disp.size());
  for (std::size_t k = 0; k < disp.size(); ++k) dev[k] = (disp[k] - median).norm();
  c = dev;
  const auto mid = c.begin() + static_cast<std::ptrdiff_t>(c.size() / 2);
  std::nth_element(c.begin(), mid, c.end());
  const double gate = std::clamp(3.0 * 1.4826 * *mid, cfg.inlier_gate_min_m, cfg.inlier_gate_m);

  std::vector<Correspondence> out;
  for (std::size_t k = 0; k < corr.size(); ++k)
    if (dev[k] <= gate) out.push_back(corr[k]);
  return out;
}

/// Camera increment P_{t-1}^{-1} P_t for camera-to-world poses, given the point transform.
inline PoseSE3 camera_motion(const PoseSE3& point_transform) { return point_transform.inverse(); }

}  // namespace seedslam::geometry
