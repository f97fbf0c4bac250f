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
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "seedslam/assoc/types.hpp"
#include "seedslam/core/errors.hpp"
#include "seedslam/core/types.hpp"
#include "seedslam/geometry/stereo.hpp"
#include "seedslam/postprocess/spatial_grid.hpp"

namespace seedslam::postprocess {

enum class FallbackDepth { NearestStereoNeighbor };

struct PostprocessConfig {
  /// Seed-size duplicate radius T.
  double dedupe_radius_m = 0.004;
  std::size_t variance_neighbors = 5;
  double variance_threshold_m2 = 1e-4;
  FallbackDepth fallback_depth = FallbackDepth::NearestStereoNeighbor;

  void validate() const {
    if (!(dedupe_radius_m > 0.0)) throw ValidationError("post.dedupe_radius_m: must be > 0");
    if (variance_neighbors < 2) throw ValidationError("post.variance_neighbors: must be >= 2");
    if (!(variance_threshold_m2 >= 0.0))
      throw ValidationError("post.variance_threshold_m2: must be >= 0");
  }
};

/// Below this many points neighbor queries are answered by brute force.
inline constexpr std::size_t kBruteForceLimit = 2000;

struct DensifyResult {
  PointCloud3D cloud;
  /// Centers dropped because their frame had no stereo match to borrow depth from.
  std::size_t skipped = 0;
};

/// Lifts every left-image center of every tracked frame into the world. Stereo-matched
/// centers use their own disparity; the others take the depth of the nearest (in the image)
/// matched center of the same frame. `stereo[i]` pairs left indices (u) with right indices (v)
/// of `frames[i]`; `poses[i]` is that frame's camera-to-world pose.
inline DensifyResult densify(std::span<const DetectionFrame> frames,
                             std::span<const assoc::Assignment> stereo,
                             std::span<const PoseSE3> poses, const CameraRig& rig,
                             const PostprocessConfig& /*cfg*/,
                             double min_disparity_px = geometry::kDefaultMinDisparityPx) {
  if (stereo.size() != frames.size() || poses.size() < frames.size())
    throw ContractViolation("densify: need one assignment and one pose per frame");
  DensifyResult out;
  out.cloud.frame = CloudFrame::World;

  for (std::size_t fi = 0; fi < frames.size(); ++fi) {
    const DetectionFrame& f = frames[fi];
    std::vector<double> depth(f.left.size(), std::numeric_limits<double>::quiet_NaN());
    std::vector<std::size_t> anchors;
    for (const auto& p : stereo[fi].pairs) {
      try {
        const Vec3 pc = geometry::unproject(f.left[p.u].x, f.left[p.u].y, f.right[p.v].x, rig, min_disparity_px);
        depth[p.u] = pc.z();
        anchors.push_back(p.u);
      } catch (const GeometryError&) {
      }
    }
    if (anchors.empty()) {
      out.skipped += f.left.size();
      continue;
    }
    for (std::size_t i = 0; i < f.left.size(); ++i) {
      double z = depth[i];
      if (std::isnan(z)) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t a : anchors) {
          const double d = std::hypot(f.left[a].x - f.left[i].x, f.left[a].y - f.left[i].y);
          if (d < best) {
            best = d;
            z = depth[a];
          }
        }
      }
      const Vec3 pc((f.left[i].x - rig.cx) * z / rig.f, (f.left[i].y - rig.cy) * z / rig.f, z);
      out.cloud.points.push_back(poses[fi].transform(pc));
    }
  }
  return out;
}

/// Greedy duplicate suppression in input order: a point is kept iff no kept point lies
/// strictly closer than `dedupe_radius_m`.
inline PointCloud3D dedupe(const PointCloud3D& points, const PostprocessConfig& cfg) {
  PointCloud3D out;
  out.frame = points.frame;
  const double r = cfg.dedupe_radius_m;
  if (points.size() < kBruteForceLimit) {
    const double r2 = r * r;
    for (const auto& p : points.points) {
      const bool dup = std::any_of(out.points.begin(), out.points.end(),
                                   [&](const Vec3& q) { return (q - p).squaredNorm() < r2; });
      if (!dup) out.points.push_back(p);
    }
    return out;
  }
  SpatialGrid grid(2.0 * r);
  for (const auto& p : points.points) {
    if (grid.any_within(p, r)) continue;
    grid.insert(p, out.points.size());
    out.points.push_back(p);
  }
  return out;
}

/// Population variance of the distances from each point to its `n` nearest neighbors.
inline std::vector<double> neighbor_distance_variance(const PointCloud3D& points, std::size_t n) {
  const std::size_t count = points.size();
  std::vector<double> var(count, 0.0);
  if (count < 2) return var;
  const std::size_t k = std::min(n, count - 1);

  auto variance_of = [](const std::vector<double>& d) {
    double mean = 0.0;
    for (double v : d) mean += v;
    mean /= static_cast<double>(d.size());
    double acc = 0.0;
    for (double v : d) acc += (v - mean) * (v - mean);
    return acc / static_cast<double>(d.size());
  };

  if (count < kBruteForceLimit) {
    std::vector<double> d;
    for (std::size_t i = 0; i < count; ++i) {
      d.clear();
      for (std::size_t j = 0; j < count; ++j)
        if (j != i) d.push_back((points.points[j] - points.points[i]).norm());
      std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
      d.resize(k);
      var[i] = variance_of(d);
    }
    return var;
  }

  // Cell sized so that a cell holds a handful of points on average.
  Vec3 lo = points.points.front(), hi = lo;
  for (const auto& p : points.points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec3 ext = (hi - lo).cwiseMax(1e-6);
  const double cell = std::max(std::cbrt(ext.prod() / static_cast<double>(count)) * 2.0, 1e-6);
  SpatialGrid grid(cell);
  for (std::size_t i = 0; i < count; ++i) grid.insert(points.points[i], i);
  for (std::size_t i = 0; i < count; ++i) var[i] = variance_of(grid.knn_distances(points.points[i], k, i));
  return var;
}

/// Removes points whose neighbor-distance variance exceeds the threshold. All decisions are
/// taken on the input cloud. With too few points the input is returned unchanged and
/// `warning`, if given, explains why.
inline PointCloud3D variance_filter(const PointCloud3D& points, const PostprocessConfig& cfg,
                                    std::string* warning = nullptr) {
  if (points.size() <= cfg.variance_neighbors) {
    if (warning) {
      *warning = "variance filter skipped: " + std::to_string(points.size()) +
                 " points, need more than " + std::to_string(cfg.variance_neighbors);
    }
    return points;
  }
  const auto var = neighbor_distance_variance(points, cfg.variance_neighbors);
  PointCloud3D out;
  out.frame = points.frame;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (!(var[i] > cfg.variance_threshold_m2)) out.points.push_back(points.points[i]);
  return out;
}

/// ASCII PLY with one `x y z` vertex per point, meters.
inline void write_ply(std::ostream& out, const PointCloud3D& cloud) {
  out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
      << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
  const auto old = out.precision(10);
  for (const auto& p : cloud.points) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  out.precision(old);
}

}  // namespace seedslam::postprocess
