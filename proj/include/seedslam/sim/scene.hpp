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
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "seedslam/core/detection_io.hpp"
#include "seedslam/core/errors.hpp"
#include "seedslam/core/types.hpp"
#include "seedslam/geometry/stereo.hpp"

namespace seedslam::sim {

/// Synthetic row-crop scene and detector corruption parameters.
///
/// World frame is the first camera: x along the row (direction of travel), y down,
/// z toward the plants.
struct SimConfig {
  double range_length_m = 4.0;
  int n_panicles = 20;
  int seeds_per_panicle = 30;
  double panicle_spread_m = 0.06;
  double camera_speed_mps = 0.4;
  double frame_rate_hz = 5.0;
  CameraRig rig;
  double pixel_noise_sigma_px = 0.0;
  double false_negative_rate = 0.0;
  double false_positive_rate_per_frame = 0.0;
  std::uint64_t rng_seed = 1;

  double standoff_m = 1.0;
  double standoff_jitter_m = 0.08;
  /// Panicle centers are spread over [-h, h] vertically.
  double panicle_height_half_range_m = 0.35;
  /// Depth semi-axis of a panicle as a fraction of panicle_spread_m.
  double panicle_depth_ratio = 0.5;
  double min_seed_spacing_m = 0.004;
  double min_visible_depth_m = 0.3;
  double max_visible_depth_m = 3.0;

  double frame_spacing_m() const { return camera_speed_mps / frame_rate_hz; }

  std::size_t n_frames() const {
    return static_cast<std::size_t>(std::floor(range_length_m / frame_spacing_m() + 1e-9)) + 1;
  }

  void validate() const {
    rig.validate();
    if (!(range_length_m >= 0.0)) throw ValidationError("sim.range_length_m: must be >= 0");
    if (n_panicles < 0 || seeds_per_panicle < 0)
      throw ValidationError("sim.n_panicles/seeds_per_panicle: must be >= 0");
    if (!(panicle_spread_m > 0.0)) throw ValidationError("sim.panicle_spread_m: must be > 0");
    if (!(camera_speed_mps > 0.0)) throw ValidationError("sim.camera_speed_mps: must be > 0");
    if (!(frame_rate_hz > 0.0)) throw ValidationError("sim.frame_rate_hz: must be > 0");
    if (!(pixel_noise_sigma_px >= 0.0)) throw ValidationError("sim.pixel_noise_sigma_px: must be >= 0");
    if (!(false_negative_rate >= 0.0 && false_negative_rate <= 1.0))
      throw ValidationError("sim.false_negative_rate: must be in [0, 1]");
    if (!(false_positive_rate_per_frame >= 0.0))
      throw ValidationError("sim.false_positive_rate_per_frame: must be >= 0");
    if (!(panicle_depth_ratio >= 0.0)) throw ValidationError("sim.panicle_depth_ratio: must be >= 0");
    if (!(standoff_jitter_m >= 0.0)) throw ValidationError("sim.standoff_jitter_m: must be >= 0");
    if (!(standoff_m > standoff_jitter_m + panicle_spread_m * panicle_depth_ratio))
      throw ValidationError("sim.standoff_m: plants must stay in front of the camera");
  }
};

struct GroundTruth {
  CameraRig rig;
  double range_length_m = 0.0;
  std::map<LandmarkId, Vec3> landmarks;
  /// Camera-to-world pose per frame.
  std::vector<PoseSE3> poses;
  std::vector<double> timestamps;
  /// Landmarks inside both image frusta, per frame, ascending id.
  std::vector<std::vector<LandmarkId>> visible;

  std::size_t n_frames() const { return poses.size(); }
};

struct BoundingBox {
  Vec3 min;
  Vec3 max;

  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
};

/// Region every generated seed lies in.
inline BoundingBox row_bounding_box(const SimConfig& cfg) {
  const double s = cfg.panicle_spread_m;
  const double h = cfg.panicle_height_half_range_m;
  const double sz = s * cfg.panicle_depth_ratio;
  return {Vec3(-s, -h - s, cfg.standoff_m - cfg.standoff_jitter_m - sz),
          Vec3(cfg.range_length_m + s, h + s, cfg.standoff_m + cfg.standoff_jitter_m + sz)};
}

/// SplitMix64 finalizer; derives independent sub-seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline bool visible_in_both(const Vec3& pc, const SimConfig& cfg) {
  if (pc.z() < cfg.min_visible_depth_m || pc.z() > cfg.max_visible_depth_m) return false;
  const StereoMeasurement m = geometry::project(pc, cfg.rig);
  return cfg.rig.contains(m.x, m.y) && cfg.rig.contains(m.u_right, m.y);
}

/// Places panicles along the row and samples seeds inside each panicle's ellipsoid
/// (semi-axes spread, spread, spread * depth ratio) with a minimum seed spacing. Deterministic in
/// `rng_seed`.
inline GroundTruth generate_scene(const SimConfig& cfg) {
  cfg.validate();
  GroundTruth gt;
  gt.rig = cfg.rig;
  gt.range_length_m = cfg.range_length_m;

  std::mt19937_64 rng(mix_seed(cfg.rng_seed, 0));
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> along(0.0, cfg.range_length_m);
  std::uniform_real_distribution<double> height(-cfg.panicle_height_half_range_m,
                                                cfg.panicle_height_half_range_m);
  std::uniform_real_distribution<double> depth(-1.0, 1.0);

  const double s = cfg.panicle_spread_m;
  const double min_sq = cfg.min_seed_spacing_m * cfg.min_seed_spacing_m;
  std::vector<Vec3> seeds;
  LandmarkId next_id = 0;
  for (int p = 0; p < cfg.n_panicles; ++p) {
    const Vec3 center(along(rng), height(rng), cfg.standoff_m + cfg.standoff_jitter_m * depth(rng));
    for (int k = 0; k < cfg.seeds_per_panicle; ++k) {
      for (int attempt = 0; attempt < 1000; ++attempt) {
        const Vec3 u(unit(rng), unit(rng), unit(rng));
        if (u.squaredNorm() > 1.0) continue;
        const Vec3 seed = center + Vec3(u.x() * s, u.y() * s, u.z() * s * cfg.panicle_depth_ratio);
        const bool crowded = std::any_of(seeds.begin(), seeds.end(), [&](const Vec3& o) {
          return (o - seed).squaredNorm() < min_sq;
        });
        if (crowded) continue;
        seeds.push_back(seed);
        gt.landmarks.emplace(next_id++, seed);
        break;
      }
    }
  }

  const std::size_t n = cfg.n_frames();
  const double step = cfg.frame_spacing_m();
  for (std::size_t k = 0; k < n; ++k) {
    const PoseSE3 pose = PoseSE3::from_translation(Vec3(static_cast<double>(k) * step, 0.0, 0.0));
    gt.poses.push_back(pose);
    gt.timestamps.push_back(static_cast<double>(k) / cfg.frame_rate_hz);
    std::vector<LandmarkId> vis;
    for (const auto& [id, p] : gt.landmarks)
      if (visible_in_both(pose.inverse_transform(p), cfg)) vis.push_back(id);
    gt.visible.push_back(std::move(vis));
  }
  return gt;
}

/// Detections for one frame: projections of visible seeds with isotropic pixel noise,
/// independent per-image dropouts, and Poisson-distributed spurious detections without ids.
/// The random stream depends only on (rng_seed, frame_index), so frames can be rendered in
/// any order.
inline DetectionFrame render_frame(const GroundTruth& gt, std::size_t frame_index, const SimConfig& cfg) {
  if (frame_index >= gt.n_frames()) throw ContractViolation("render_frame: frame index out of range");
  std::mt19937_64 rng(mix_seed(cfg.rng_seed, 1000 + frame_index));
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const CameraRig& rig = cfg.rig;
  const double sigma = cfg.pixel_noise_sigma_px;

  DetectionFrame f;
  f.frame_index = static_cast<std::int64_t>(frame_index);
  f.timestamp = gt.timestamps[frame_index];
  const PoseSE3& pose = gt.poses[frame_index];

  for (LandmarkId id : gt.visible[frame_index]) {
    const StereoMeasurement m = geometry::project(pose.inverse_transform(gt.landmarks.at(id)), rig);
    // Draw every variate unconditionally so one corruption knob does not reshuffle the others.
    const bool drop_left = uniform(rng) < cfg.false_negative_rate;
    const bool drop_right = uniform(rng) < cfg.false_negative_rate;
    const double nlx = noise(rng) * sigma, nly = noise(rng) * sigma;
    const double nrx = noise(rng) * sigma, nry = noise(rng) * sigma;
    const double lx = m.x + nlx, ly = m.y + nly, rx = m.u_right + nrx, ry = m.y + nry;
    if (!drop_left && rig.contains(lx, ly)) f.left.push_back({lx, ly, id});
    if (!drop_right && rig.contains(rx, ry)) f.right.push_back({rx, ry, id});
  }

  std::poisson_distribution<int> spurious(cfg.false_positive_rate_per_frame);
  std::uniform_real_distribution<double> ux(0.0, rig.width_px), uy(0.0, rig.height_px);
  for (auto* side : {&f.left, &f.right}) {
    const int n = cfg.false_positive_rate_per_frame > 0.0 ? spurious(rng) : 0;
    for (int i = 0; i < n; ++i) side->push_back({ux(rng), uy(rng), std::nullopt});
    std::shuffle(side->begin(), side->end(), rng);
    // Centers closer than a pixel are indistinguishable to a detector.
    seedslam::detail::drop_exact_duplicates(*side);
  }
  return f;
}

inline std::vector<DetectionFrame> render_sequence(const GroundTruth& gt, const SimConfig& cfg) {
  std::vector<DetectionFrame> frames;
  frames.reserve(gt.n_frames());
  for (std::size_t k = 0; k < gt.n_frames(); ++k) frames.push_back(render_frame(gt, k, cfg));
  return frames;
}

}  // namespace seedslam::sim
