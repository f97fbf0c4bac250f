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
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "seedslam/core/errors.hpp"
#include "seedslam/core/se3.hpp"

namespace seedslam {

using LandmarkId = std::int64_t;

/// Detected object center in pixels. Subpixel; `id` is set only for simulated data.
struct Keypoint2D {
  double x = 0.0;
  double y = 0.0;
  std::optional<LandmarkId> id = std::nullopt;

  friend bool operator==(const Keypoint2D&, const Keypoint2D&) = default;
};

struct DetectionFrame {
  std::int64_t frame_index = 0;
  double timestamp = 0.0;
  std::vector<Keypoint2D> left;
  std::vector<Keypoint2D> right;

  friend bool operator==(const DetectionFrame&, const DetectionFrame&) = default;
};

/// Rectified pinhole stereo pair; the right camera sits `baseline_m` along +x of the left.
struct CameraRig {
  double f = 2500.0;
  double cx = 2048.0;
  double cy = 1500.0;
  double baseline_m = 0.11;
  int width_px = 4096;
  int height_px = 3000;

  void validate() const {
    if (!(f > 0.0)) throw ValidationError("rig.f: must be > 0");
    if (!(baseline_m > 0.0)) throw ValidationError("rig.baseline_m: must be > 0");
    if (width_px <= 0 || height_px <= 0) throw ValidationError("rig: image size must be positive");
    if (!(cx > 0.0 && cx < width_px)) throw ValidationError("rig.cx: must lie inside (0, width_px)");
    if (!(cy > 0.0 && cy < height_px)) throw ValidationError("rig.cy: must lie inside (0, height_px)");
  }

  bool contains(double x, double y) const {
    return x >= 0.0 && y >= 0.0 && x < width_px && y < height_px;
  }

  friend bool operator==(const CameraRig&, const CameraRig&) = default;
};

struct StereoMatch {
  Keypoint2D left;
  double u_right = 0.0;
  double cost = 0.0;

  double disparity() const { return left.x - u_right; }
};

/// Stereo measurement ordered as the factor graph consumes it.
struct StereoMeasurement {
  double x = 0.0;
  double u_right = 0.0;
  double y = 0.0;

  Vec3 as_vector() const { return {x, u_right, y}; }
};

enum class CloudFrame { Camera, World };

struct PointCloud3D {
  std::vector<Vec3> points;
  CloudFrame frame = CloudFrame::World;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Optimized (or tracked) camera poses keyed by the detection frame index.
struct TrajectoryEstimate {
  std::vector<std::int64_t> frame_indices;
  std::vector<PoseSE3> poses;

  std::size_t size() const { return poses.size(); }
  bool empty() const { return poses.empty(); }
};

}  // namespace seedslam
