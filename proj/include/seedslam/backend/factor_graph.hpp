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

#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "seedslam/backend/config.hpp"
#include "seedslam/backend/factors.hpp"
#include "seedslam/backend/landmark_track.hpp"
#include "seedslam/core/errors.hpp"
#include "seedslam/geometry/stereo.hpp"

namespace seedslam::backend {

struct StereoObservation {
  LandmarkId landmark = 0;
  double x = 0.0;
  double u_right = 0.0;
  double y = 0.0;
};

struct StereoFactor {
  std::size_t pose = 0;
  /// Slot of the landmark in FactorGraph::landmark_values().
  std::size_t landmark_slot = 0;
  LandmarkId landmark = 0;
  StereoMeasurement measured;
};

struct MotionFactor {
  std::size_t from = 0;
  std::size_t to = 0;
  /// Measured camera increment P_from^{-1} P_to.
  PoseSE3 measured;
};

/// Stereo-projection / motion-prior factor graph over camera-to-world poses and world
/// landmarks, grown one frame at a time. Pose 0 is held at its gauge prior.
class FactorGraph {
 public:
  FactorGraph(CameraRig rig, BackendConfig cfg, Vec3 motion_direction = Vec3::UnitX(),
              double min_disparity_px = geometry::kDefaultMinDisparityPx)
      : rig_(rig), cfg_(cfg), motion_direction_(motion_direction.normalized()),
        min_disparity_px_(min_disparity_px) {}

  /// Appends a pose initialized at `pose_estimate`, a motion factor from the previous pose
  /// measuring `relative_pose` (ignored for the first frame), and the frame's stereo
  /// observations. A track contributes stereo factors once it has been seen from two poses.
  /// Returns the new pose index.
  std::size_t add_frame(const PoseSE3& pose_estimate, const PoseSE3& relative_pose,
                        std::span<const StereoObservation> observations) {
    std::set<LandmarkId> seen;
    for (const auto& o : observations) {
      if (!seen.insert(o.landmark).second) {
        throw ValidationError("duplicate stereo factor for landmark " + std::to_string(o.landmark) +
                              " at pose " + std::to_string(poses_.size()));
      }
    }

    const std::size_t k = poses_.size();
    poses_.push_back(pose_estimate);
    if (k == 0) {
      gauge_prior_ = pose_estimate;
    } else {
      motion_factors_.push_back({k - 1, k, relative_pose});
    }

    for (const auto& o : observations) {
      const StereoMeasurement meas{o.x, o.u_right, o.y};
      const Vec3 world = pose_estimate.transform(geometry::unproject(meas, rig_, min_disparity_px_));
      auto [it, inserted] = tracks_.try_emplace(o.landmark);
      LandmarkTrack& track = it->second;
      if (inserted) {
        track.landmark_id = o.landmark;
        track.current_estimate = world;
        track.observations.push_back({k, meas});
        continue;
      }
      if (track.n_poses_seen() == 1) {
        // Re-express the first sighting with the latest estimate of its pose.
        const auto& first = track.observations.front();
        track.current_estimate = poses_[first.pose_index].transform(
            geometry::unproject(first.measurement, rig_, min_disparity_px_));
      }
      track.current_estimate = update_landmark_estimate(track, world);
      track.observations.push_back({k, meas});

      if (track.n_poses_seen() == 2) {
        const std::size_t slot = landmark_values_.size();
        landmark_slot_[o.landmark] = slot;
        landmark_ids_.push_back(o.landmark);
        landmark_values_.push_back(track.current_estimate);
        for (const auto& prev : track.observations)
          stereo_factors_.push_back({prev.pose_index, slot, o.landmark, prev.measurement});
      } else {
        const std::size_t slot = landmark_slot_.at(o.landmark);
        landmark_values_[slot] = track.current_estimate;
        stereo_factors_.push_back({k, slot, o.landmark, meas});
      }
    }
    return k;
  }

  /// Writes optimized values back and records them as the tracks' last optimized estimates.
  void set_estimates(std::span<const PoseSE3> poses, std::span<const Vec3> landmarks) {
    if (poses.size() != poses_.size() || landmarks.size() != landmark_values_.size())
      throw ContractViolation("set_estimates: size mismatch with graph");
    poses_.assign(poses.begin(), poses.end());
    landmark_values_.assign(landmarks.begin(), landmarks.end());
    for (std::size_t s = 0; s < landmark_ids_.size(); ++s) {
      auto& t = tracks_.at(landmark_ids_[s]);
      t.current_estimate = landmark_values_[s];
      t.last_optimized = landmark_values_[s];
    }
  }

  const CameraRig& rig() const { return rig_; }
  const BackendConfig& config() const { return cfg_; }
  const Vec3& motion_direction() const { return motion_direction_; }
  const PoseSE3& gauge_prior() const { return gauge_prior_; }

  const std::vector<PoseSE3>& poses() const { return poses_; }
  const std::vector<Vec3>& landmark_values() const { return landmark_values_; }
  const std::vector<LandmarkId>& landmark_ids() const { return landmark_ids_; }
  const std::vector<StereoFactor>& stereo_factors() const { return stereo_factors_; }
  const std::vector<MotionFactor>& motion_factors() const { return motion_factors_; }
  const std::unordered_map<LandmarkId, LandmarkTrack>& tracks() const { return tracks_; }

  std::size_t num_poses() const { return poses_.size(); }
  std::size_t num_landmarks() const { return landmark_values_.size(); }

  bool has_landmark(LandmarkId id) const { return landmark_slot_.count(id) > 0; }
  const Vec3& landmark(LandmarkId id) const { return landmark_values_.at(landmark_slot_.at(id)); }

  std::size_t stereo_factor_count(LandmarkId id) const {
    auto it = tracks_.find(id);
    return it != tracks_.end() && it->second.in_graph() ? it->second.n_poses_seen() : 0;
  }

 private:
  CameraRig rig_;
  BackendConfig cfg_;
  Vec3 motion_direction_;
  double min_disparity_px_;
  PoseSE3 gauge_prior_;

  std::vector<PoseSE3> poses_;
  std::vector<Vec3> landmark_values_;
  std::vector<LandmarkId> landmark_ids_;
  std::map<LandmarkId, std::size_t> landmark_slot_;
  std::vector<StereoFactor> stereo_factors_;
  std::vector<MotionFactor> motion_factors_;
  std::unordered_map<LandmarkId, LandmarkTrack> tracks_;
};

}  // namespace seedslam::backend
