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
#include <chrono>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seedslam/assoc/associate.hpp"
#include "seedslam/backend/export.hpp"
#include "seedslam/backend/factor_graph.hpp"
#include "seedslam/backend/optimizer.hpp"
#include "seedslam/config.hpp"
#include "seedslam/core/errors.hpp"
#include "seedslam/geometry/icp.hpp"
#include "seedslam/geometry/stereo.hpp"
#include "seedslam/postprocess/postprocess.hpp"

namespace seedslam::pipeline {

struct PipelineOptions {
  /// Batch optimization after every k-th frame (and always after the last tracked one).
  std::size_t optimize_stride = 1;
  double min_disparity_px = geometry::kDefaultMinDisparityPx;
};

/// Per-frame bookkeeping kept for debugging dumps and densification.
struct FrameRecord {
  std::int64_t frame_index = 0;
  /// Stereo pairs whose depth passed the gate.
  assoc::Assignment stereo;
  /// Left(t-1) -> left(t); empty for the first frame.
  assoc::Assignment temporal;
  /// Track id of every left keypoint.
  std::vector<LandmarkId> track_ids;
  std::size_t correspondences = 0;
};

struct PipelineResult {
  TrajectoryEstimate trajectory;
  std::vector<backend::MapLandmark> landmarks;
  /// Densified, deduplicated, variance-filtered world cloud.
  PointCloud3D cloud;
  std::size_t densify_skipped = 0;
  std::size_t dense_points = 0;
  std::size_t deduped_points = 0;
  std::string variance_warning;

  FailureReason failure_reason = FailureReason::None;
  std::optional<std::int64_t> failure_frame;
  std::string failure_detail;
  /// Temporal correspondences used for pose estimation per tracked frame (0 for the first).
  std::vector<std::size_t> per_frame_match_counts;
  std::vector<FrameRecord> records;

  double seconds_frontend = 0.0;
  double seconds_backend = 0.0;
  double seconds_postprocess = 0.0;
};

/// Frame-by-frame stereo SLAM: stereo association, depth-gated unprojection, temporal
/// association of consecutive left images, translation-only registration, factor graph
/// update and batch optimization. Stops at the first tracking failure.
class SlamPipeline {
 public:
  SlamPipeline(PipelineConfig cfg, PipelineOptions opts = {})
      : cfg_(std::move(cfg)), opts_(opts),
        graph_(cfg_.rig, cfg_.backend, cfg_.icp.motion_direction, opts.min_disparity_px) {
    cfg_.validate();
    if (opts_.optimize_stride == 0) throw ValidationError("optimize_stride: must be >= 1");
  }

  /// Processes one frame. Returns false (and records the failure) if tracking was lost;
  /// later calls are then ignored.
  bool process(const DetectionFrame& frame) {
    if (stopped_) return false;
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();

    FrameRecord rec;
    rec.frame_index = frame.frame_index;
    const assoc::Assignment raw = assoc::associate(frame.left, frame.right, cfg_.assoc);
    rec.stereo.unmatched_v = raw.unmatched_v;
    rec.stereo.unmatched_u = raw.unmatched_u;

    PointCloud3D cloud;
    cloud.frame = CloudFrame::Camera;
    std::vector<std::optional<std::size_t>> point_of(frame.left.size());
    std::vector<backend::StereoObservation> obs;
    std::vector<std::size_t> obs_left;
    for (const auto& p : raw.pairs) {
      const Keypoint2D& l = frame.left[p.u];
      const double ur = frame.right[p.v].x;
      bool ok = false;
      try {
        const Vec3 pc = geometry::unproject(l.x, l.y, ur, cfg_.rig, opts_.min_disparity_px);
        if (pc.z() >= cfg_.icp.min_depth_m && pc.z() <= cfg_.icp.max_depth_m) {
          point_of[p.u] = cloud.points.size();
          cloud.points.push_back(pc);
          obs_left.push_back(p.u);
          obs.push_back({0, l.x, ur, l.y});
          ok = true;
        }
      } catch (const GeometryError&) {
      }
      if (ok) {
        rec.stereo.pairs.push_back(p);
      } else {
        rec.stereo.unmatched_u.push_back(p.u);
        rec.stereo.unmatched_v.push_back(p.v);
      }
    }

    std::sort(rec.stereo.unmatched_u.begin(), rec.stereo.unmatched_u.end());
    std::sort(rec.stereo.unmatched_v.begin(), rec.stereo.unmatched_v.end());

    rec.track_ids.assign(frame.left.size(), -1);
    PoseSE3 pose_init = PoseSE3::identity();
    PoseSE3 increment = PoseSE3::identity();
    if (graph_.num_poses() > 0) {
      rec.temporal = assoc::associate(prev_frame_.left, frame.left, cfg_.assoc);
      std::vector<geometry::Correspondence> corr;
      std::map<geometry::Correspondence, std::size_t> left_of;
      for (const auto& p : rec.temporal.pairs) {
        if (prev_point_of_[p.u] && point_of[p.v]) {
          corr.emplace_back(*prev_point_of_[p.u], *point_of[p.v]);
          left_of[corr.back()] = p.u;
        }
      }
      // Only pairs that agree with the common motion continue a track.
      const auto inliers = geometry::gate_correspondences(prev_cloud_, cloud, corr, cfg_.icp);
      for (const auto& c : inliers) rec.track_ids[obs_left[c.second]] = prev_ids_[left_of.at(c)];
      rec.correspondences = inliers.size();
      try {
        const PoseSE3 point_transform = geometry::estimate_relative_pose(prev_cloud_, cloud, inliers, cfg_.icp);
        increment = geometry::camera_motion(point_transform);
        pose_init = compose(graph_.poses().back(), increment);
      } catch (const TrackingFailure& e) {
        seconds_frontend_ += seconds_since(t0);
        fail(frame.frame_index, e.reason(), e.what());
        return false;
      }
    }
    for (auto& id : rec.track_ids)
      if (id < 0) id = next_track_id_++;
    for (std::size_t k = 0; k < obs.size(); ++k) obs[k].landmark = rec.track_ids[obs_left[k]];
    seconds_frontend_ += seconds_since(t0);

    const auto t1 = clock::now();
    graph_.add_frame(pose_init, increment, obs);
    ++since_optimized_;
    if (since_optimized_ >= opts_.optimize_stride && !run_optimizer(frame.frame_index)) {
      seconds_backend_ += seconds_since(t1);
      return false;
    }
    seconds_backend_ += seconds_since(t1);

    match_counts_.push_back(rec.correspondences);
    frames_.push_back(frame);
    prev_frame_ = frame;
    prev_cloud_ = std::move(cloud);
    prev_point_of_ = std::move(point_of);
    prev_ids_ = rec.track_ids;
    records_.push_back(std::move(rec));
    return true;
  }

  /// Final optimization (if pending) and map post-processing.
  PipelineResult finish() {
    PipelineResult res;
    if (since_optimized_ > 0 && !stopped_) {
      const auto t1 = std::chrono::steady_clock::now();
      run_optimizer(frames_.empty() ? 0 : frames_.back().frame_index);
      seconds_backend_ += seconds_since(t1);
    }
    // After a failure inside the optimizer the graph holds one pose too many.
    const std::size_t n = records_.size();

    for (std::size_t k = 0; k < n; ++k) {
      res.trajectory.frame_indices.push_back(records_[k].frame_index);
      res.trajectory.poses.push_back(graph_.poses()[k]);
    }
    for (std::size_t s = 0; s < graph_.num_landmarks(); ++s) {
      const LandmarkId id = graph_.landmark_ids()[s];
      res.landmarks.push_back({id, graph_.landmark_values()[s], graph_.tracks().at(id).n_poses_seen()});
    }

    const auto t2 = std::chrono::steady_clock::now();
    std::vector<assoc::Assignment> stereo;
    for (const auto& r : records_) stereo.push_back(r.stereo);
    const auto dense = postprocess::densify(std::span<const DetectionFrame>(frames_.data(), n), stereo,
                                            res.trajectory.poses, cfg_.rig, cfg_.post, opts_.min_disparity_px);
    res.densify_skipped = dense.skipped;
    res.dense_points = dense.cloud.size();
    const PointCloud3D deduped = postprocess::dedupe(dense.cloud, cfg_.post);
    res.deduped_points = deduped.size();
    res.cloud = postprocess::variance_filter(deduped, cfg_.post, &res.variance_warning);
    seconds_postprocess_ += seconds_since(t2);

    res.failure_reason = failure_reason_;
    res.failure_frame = failure_frame_;
    res.failure_detail = failure_detail_;
    res.per_frame_match_counts = match_counts_;
    res.records = records_;
    res.seconds_frontend = seconds_frontend_;
    res.seconds_backend = seconds_backend_;
    res.seconds_postprocess = seconds_postprocess_;
    return res;
  }

  const backend::FactorGraph& graph() const { return graph_; }
  bool stopped() const { return stopped_; }

 private:
  static double seconds_since(std::chrono::steady_clock::time_point t) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
  }

  void fail(std::int64_t frame, FailureReason reason, const std::string& detail) {
    stopped_ = true;
    failure_reason_ = reason;
    failure_frame_ = frame;
    failure_detail_ = "frame " + std::to_string(frame) + ": " + detail;
  }

  bool run_optimizer(std::int64_t frame) {
    since_optimized_ = 0;
    try {
      const auto r = backend::optimize(graph_, cfg_.backend);
      graph_.set_estimates(r.poses, r.landmarks);
      return true;
    } catch (const backend::OptimizerError& e) {
      fail(frame, FailureReason::OptimizerDivergence, e.what());
      return false;
    }
  }

  PipelineConfig cfg_;
  PipelineOptions opts_;
  backend::FactorGraph graph_;

  std::vector<DetectionFrame> frames_;
  std::vector<FrameRecord> records_;
  std::vector<std::size_t> match_counts_;
  DetectionFrame prev_frame_;
  PointCloud3D prev_cloud_;
  std::vector<std::optional<std::size_t>> prev_point_of_;
  std::vector<LandmarkId> prev_ids_;
  LandmarkId next_track_id_ = 0;
  std::size_t since_optimized_ = 0;

  bool stopped_ = false;
  FailureReason failure_reason_ = FailureReason::None;
  std::optional<std::int64_t> failure_frame_;
  std::string failure_detail_;
  double seconds_frontend_ = 0.0;
  double seconds_backend_ = 0.0;
  double seconds_postprocess_ = 0.0;
};

inline PipelineResult run_pipeline(std::span<const DetectionFrame> frames, const PipelineConfig& cfg,
                                   const PipelineOptions& opts = {}) {
  SlamPipeline p(cfg, opts);
  for (const auto& f : frames)
    if (!p.process(f)) break;
  return p.finish();
}

}  // namespace seedslam::pipeline
