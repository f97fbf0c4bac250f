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

#include <cstddef>
#include <optional>
#include <vector>

#include "seedslam/core/errors.hpp"
#include "seedslam/core/types.hpp"

namespace seedslam::backend {

struct TrackObservation {
  std::size_t pose_index = 0;
  StereoMeasurement measurement;
};

/// One physical object followed through time.
struct LandmarkTrack {
  LandmarkId landmark_id = 0;
  std::vector<TrackObservation> observations;
  /// Current world-frame estimate; for a once-seen track this is its single unprojection.
  Vec3 current_estimate = Vec3::Zero();
  std::optional<Vec3> last_optimized;

  std::size_t n_poses_seen() const { return observations.size(); }
  bool in_graph() const { return observations.size() >= 2; }
};

/// Initial guess for a track re-observed at `new_obs_world`.
///
/// Seen once before: midpoint of the two world points. Seen N > 1 times: the current
/// estimate weighted by N, averaged with the new point. After a per-frame optimization the
/// current estimate is the optimized position; with a coarser optimization stride it is the
/// running average since the last optimization.
inline Vec3 update_landmark_estimate(const LandmarkTrack& track, const Vec3& new_obs_world) {
  if (!new_obs_world.allFinite()) throw ContractViolation("new landmark observation is not finite");
  const std::size_t n = track.n_poses_seen();
  if (n == 0) throw ContractViolation("track has no prior observation");
  if (n == 1) return (track.current_estimate + new_obs_world) / 2.0;
  const double dn = static_cast<double>(n);
  return (dn * track.current_estimate + new_obs_world) / (dn + 1.0);
}

}  // namespace seedslam::backend
