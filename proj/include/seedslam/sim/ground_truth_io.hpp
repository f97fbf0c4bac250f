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

#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "seedslam/core/errors.hpp"
#include "seedslam/sim/scene.hpp"

namespace seedslam::sim {

inline nlohmann::ordered_json rig_to_json(const CameraRig& rig) {
  nlohmann::ordered_json j;
  j["f"] = rig.f;
  j["cx"] = rig.cx;
  j["cy"] = rig.cy;
  j["baseline_m"] = rig.baseline_m;
  j["width_px"] = rig.width_px;
  j["height_px"] = rig.height_px;
  return j;
}

/// Ground-truth sidecar: rig, landmark positions, per-frame poses and visibility labels.
inline nlohmann::ordered_json ground_truth_to_json(const GroundTruth& gt) {
  nlohmann::ordered_json j;
  j["rig"] = rig_to_json(gt.rig);
  j["range_length_m"] = gt.range_length_m;
  auto lms = nlohmann::ordered_json::array();
  for (const auto& [id, p] : gt.landmarks)
    lms.push_back(nlohmann::ordered_json{{"id", id}, {"x", p.x()}, {"y", p.y()}, {"z", p.z()}});
  j["landmarks"] = std::move(lms);
  auto poses = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < gt.poses.size(); ++k) {
    const auto& p = gt.poses[k];
    const auto q = p.quaternion();
    poses.push_back(nlohmann::ordered_json{{"frame", k},
                                           {"t", gt.timestamps[k]},
                                           {"tx", p.translation.x()},
                                           {"ty", p.translation.y()},
                                           {"tz", p.translation.z()},
                                           {"qx", q.x()},
                                           {"qy", q.y()},
                                           {"qz", q.z()},
                                           {"qw", q.w()},
                                           {"visible", gt.visible[k]}});
  }
  j["poses"] = std::move(poses);
  return j;
}

inline GroundTruth ground_truth_from_json(const nlohmann::json& j) {
  try {
    GroundTruth gt;
    const auto& r = j.at("rig");
    gt.rig = {r.at("f").get<double>(),         r.at("cx").get<double>(),
              r.at("cy").get<double>(),        r.at("baseline_m").get<double>(),
              r.at("width_px").get<int>(),     r.at("height_px").get<int>()};
    gt.range_length_m = j.at("range_length_m").get<double>();
    for (const auto& l : j.at("landmarks"))
      gt.landmarks.emplace(l.at("id").get<LandmarkId>(),
                           Vec3(l.at("x").get<double>(), l.at("y").get<double>(), l.at("z").get<double>()));
    for (const auto& p : j.at("poses")) {
      const Vec3 t(p.at("tx").get<double>(), p.at("ty").get<double>(), p.at("tz").get<double>());
      gt.poses.push_back(pose_from_quaternion(t, p.at("qx").get<double>(), p.at("qy").get<double>(),
                                              p.at("qz").get<double>(), p.at("qw").get<double>()));
      gt.timestamps.push_back(p.at("t").get<double>());
      gt.visible.push_back(p.at("visible").get<std::vector<LandmarkId>>());
    }
    return gt;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("ground truth: ") + e.what());
  }
}

inline void save_ground_truth(const std::string& path, const GroundTruth& gt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write ground truth '" + path + "'");
  out << ground_truth_to_json(gt).dump(1) << '\n';
}

inline GroundTruth load_ground_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open ground truth '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("ground truth '") + path + "': " + e.what());
  }
  return ground_truth_from_json(j);
}

}  // namespace seedslam::sim
