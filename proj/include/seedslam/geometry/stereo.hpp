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
#include <sstream>

#include "seedslam/core/errors.hpp"
#include "seedslam/core/types.hpp"

namespace seedslam::geometry {

/// Disparities below this are rejected as unreliable depth by default.
inline constexpr double kDefaultMinDisparityPx = 0.1;

/// Camera-frame point from a left pixel and the matched right-image column.
inline Vec3 unproject(double x, double y, double u_right, const CameraRig& rig,
                      double min_disparity_px = kDefaultMinDisparityPx) {
  const double d = x - u_right;
  if (!(d > 0.0)) {
    std::ostringstream msg;
    msg << "degenerate disparity " << d << " px at (" << x << ", " << y << ")";
    throw GeometryError(GeometryError::Kind::DegenerateDisparity, msg.str());
  }
  if (d < min_disparity_px) {
    std::ostringstream msg;
    msg << "disparity " << d << " px is below the " << min_disparity_px << " px floor";
    throw GeometryError(GeometryError::Kind::UnreliableDepth, msg.str());
  }
  const double z = rig.baseline_m * rig.f / d;
  return {(x - rig.cx) * z / rig.f, (y - rig.cy) * z / rig.f, z};
}

inline Vec3 unproject(const StereoMatch& m, const CameraRig& rig,
                      double min_disparity_px = kDefaultMinDisparityPx) {
  return unproject(m.left.x, m.left.y, m.u_right, rig, min_disparity_px);
}

inline Vec3 unproject(const StereoMeasurement& m, const CameraRig& rig,
                      double min_disparity_px = kDefaultMinDisparityPx) {
  return unproject(m.x, m.y, m.u_right, rig, min_disparity_px);
}

/// Stereo pinhole projection of a camera-frame point.
inline StereoMeasurement project(const Vec3& p, const CameraRig& rig) {
  if (!(p.z() > 0.0)) {
    std::ostringstream msg;
    msg << "point (" << p.x() << ", " << p.y() << ", " << p.z() << ") is behind the camera";
    throw GeometryError(GeometryError::Kind::BehindCamera, msg.str());
  }
  const double inv_z = 1.0 / p.z();
  return {rig.f * p.x() * inv_z + rig.cx, rig.f * (p.x() - rig.baseline_m) * inv_z + rig.cx,
          rig.f * p.y() * inv_z + rig.cy};
}

}  // namespace seedslam::geometry
