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
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "seedslam/core/errors.hpp"
#include "seedslam/core/types.hpp"
#include "seedslam/sim/scene.hpp"

namespace seedslam::eval {

struct RunReport {
  double max_distance_mapped_m = 0.0;
  std::optional<double> range_length_m;
  double fraction_mapped = 0.0;
  std::optional<double> ate_rmse_m;
  std::optional<double> landmark_precision;
  std::optional<double> landmark_recall;
  FailureReason failure_reason = FailureReason::None;
  std::optional<std::int64_t> failure_frame;
  std::string failure_detail;
  std::vector<std::size_t> per_frame_match_counts;
};

/// Ground-truth arc length from frame 0 to `failure_frame` (or the last frame).
inline double max_distance_mapped(const TrajectoryEstimate& trajectory,
                                  std::optional<std::int64_t> failure_frame, const sim::GroundTruth& gt) {
  if (trajectory.empty()) throw ContractViolation("max_distance_mapped: empty trajectory");
  if (gt.poses.empty()) return 0.0;
  std::int64_t last = static_cast<std::int64_t>(gt.poses.size()) - 1;
  if (failure_frame) last = std::clamp<std::int64_t>(*failure_frame, 0, last);
  double length = 0.0;
  for (std::int64_t k = 1; k <= last; ++k)
    length += (gt.poses[static_cast<std::size_t>(k)].translation -
               gt.poses[static_cast<std::size_t>(k - 1)].translation)
                  .norm();
  return length;
}

inline double trajectory_length(const sim::GroundTruth& gt) {
  double length = 0.0;
  for (std::size_t k = 1; k < gt.poses.size(); ++k)
    length += (gt.poses[k].translation - gt.poses[k - 1].translation).norm();
  return length;
}

/// Translational RMSE after aligning the estimate to ground truth through frame 0.
inline double ate_rmse(const TrajectoryEstimate& estimated, const sim::GroundTruth& gt) {
  std::vector<std::int64_t> missing;
  for (auto f : estimated.frame_indices)
    if (f < 0 || static_cast<std::size_t>(f) >= gt.poses.size()) missing.push_back(f);
  if (!missing.empty()) {
    std::string list;
    for (auto f : missing) list += (list.empty() ? "" : ", ") + std::to_string(f);
    throw ValidationError("ate_rmse: frames missing from ground truth: " + list);
  }
  if (estimated.empty()) return 0.0;
  const std::size_t ref = static_cast<std::size_t>(estimated.frame_indices.front());
  const PoseSE3 align = compose(gt.poses[ref], estimated.poses.front().inverse());
  double sum = 0.0;
  for (std::size_t i = 0; i < estimated.size(); ++i) {
    const Vec3 est = align.transform(estimated.poses[i].translation);
    sum += (est - gt.poses[static_cast<std::size_t>(estimated.frame_indices[i])].translation).squaredNorm();
  }
  return std::sqrt(sum / static_cast<double>(estimated.size()));
}

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  std::size_t matched = 0;
};

/// Greedy one-to-one matching by ascending distance within `radius`.
inline std::size_t greedy_match_count(std::span<const Vec3> a, std::span<const Vec3> b, double radius) {
  std::vector<std::tuple<double, std::size_t, std::size_t>> cand;
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double d2 = (a[i] - b[j]).squaredNorm();
      if (d2 <= r2) cand.emplace_back(d2, i, j);
    }
  std::sort(cand.begin(), cand.end());
  std::vector<char> used_a(a.size(), 0), used_b(b.size(), 0);
  std::size_t matched = 0;
  for (const auto& [d2, i, j] : cand) {
    if (used_a[i] || used_b[j]) continue;
    used_a[i] = used_b[j] = 1;
    ++matched;
  }
  return matched;
}

/// Map quality against the ground-truth landmarks in `visible_ids` (all landmarks if empty).
inline PrecisionRecall landmark_pr(const PointCloud3D& map, const sim::GroundTruth& gt, double match_radius_m,
                                   std::span<const LandmarkId> visible_ids = {}) {
  if (!(match_radius_m > 0.0)) throw ContractViolation("landmark_pr: match radius must be > 0");
  std::vector<Vec3> truth;
  if (visible_ids.empty()) {
    for (const auto& [id, p] : gt.landmarks) truth.push_back(p);
  } else {
    for (LandmarkId id : visible_ids) truth.push_back(gt.landmarks.at(id));
  }
  PrecisionRecall pr;
  pr.matched = greedy_match_count(map.points, truth, match_radius_m);
  pr.precision = map.empty() ? 0.0 : static_cast<double>(pr.matched) / static_cast<double>(map.size());
  pr.recall = truth.empty() ? 0.0 : static_cast<double>(pr.matched) / static_cast<double>(truth.size());
  return pr;
}

/// Landmarks visible in any of the first `n_frames` frames, ascending id.
inline std::vector<LandmarkId> visible_landmarks(const sim::GroundTruth& gt, std::size_t n_frames) {
  std::vector<LandmarkId> ids;
  for (std::size_t k = 0; k < std::min(n_frames, gt.visible.size()); ++k)
    ids.insert(ids.end(), gt.visible[k].begin(), gt.visible[k].end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

namespace detail {
template <class T>
nlohmann::ordered_json opt(const std::optional<T>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}
template <class T>
std::optional<T> opt_get(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<T>();
}
}  // namespace detail

inline nlohmann::ordered_json to_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["max_distance_mapped_m"] = r.max_distance_mapped_m;
  j["range_length_m"] = detail::opt(r.range_length_m);
  j["fraction_mapped"] = r.fraction_mapped;
  j["ate_rmse_m"] = detail::opt(r.ate_rmse_m);
  j["landmark_precision"] = detail::opt(r.landmark_precision);
  j["landmark_recall"] = detail::opt(r.landmark_recall);
  j["failure_reason"] = to_string(r.failure_reason);
  j["failure_frame"] = detail::opt(r.failure_frame);
  j["failure_detail"] = r.failure_detail;
  j["per_frame_match_counts"] = r.per_frame_match_counts;
  return j;
}

inline RunReport report_from_json(const nlohmann::json& j) {
  try {
    RunReport r;
    r.max_distance_mapped_m = j.at("max_distance_mapped_m").get<double>();
    r.range_length_m = detail::opt_get<double>(j, "range_length_m");
    r.fraction_mapped = j.at("fraction_mapped").get<double>();
    r.ate_rmse_m = detail::opt_get<double>(j, "ate_rmse_m");
    r.landmark_precision = detail::opt_get<double>(j, "landmark_precision");
    r.landmark_recall = detail::opt_get<double>(j, "landmark_recall");
    r.failure_reason = failure_reason_from_string(j.at("failure_reason").get<std::string>());
    r.failure_frame = detail::opt_get<std::int64_t>(j, "failure_frame");
    if (j.contains("failure_detail")) r.failure_detail = j["failure_detail"].get<std::string>();
    if (j.contains("per_frame_match_counts"))
      r.per_frame_match_counts = j["per_frame_match_counts"].get<std::vector<std::size_t>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("run report: ") + e.what());
  }
}

inline const char* kReportCsvHeader =
    "run,range_length_m,max_distance_mapped_m,fraction_mapped,mean_fraction_mapped,ate_rmse_m,"
    "landmark_precision,landmark_recall,failure_reason";

/// Aggregate table: one row per run plus the batch mean of fraction_mapped on every row.
inline void write_report_csv(std::ostream& out, std::span<const std::pair<std::string, RunReport>> runs) {
  double mean = 0.0;
  for (const auto& [name, r] : runs) mean += r.fraction_mapped;
  if (!runs.empty()) mean /= static_cast<double>(runs.size());
  auto cell = [](const std::optional<double>& v) { return v ? std::to_string(*v) : std::string(); };
  out << kReportCsvHeader << '\n';
  for (const auto& [name, r] : runs) {
    out << name << ',' << cell(r.range_length_m) << ',' << std::to_string(r.max_distance_mapped_m) << ','
        << std::to_string(r.fraction_mapped) << ',' << std::to_string(mean) << ',' << cell(r.ate_rmse_m)
        << ',' << cell(r.landmark_precision) << ',' << cell(r.landmark_recall) << ','
        << to_string(r.failure_reason) << '\n';
  }
}

}  // namespace seedslam::eval
