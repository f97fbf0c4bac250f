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

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "seedslam/core/errors.hpp"
#include "seedslam/core/types.hpp"

namespace seedslam::backend {

struct MapLandmark {
  LandmarkId id = 0;
  Vec3 position = Vec3::Zero();
  std::size_t n_observations = 0;
};

namespace detail {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

inline double to_double(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + s + "'", line);
  }
}

inline std::int64_t to_int(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("not an integer: '" + s + "'", line);
  }
}

}  // namespace detail

/// CSV `frame,tx,ty,tz,qx,qy,qz,qw`, full double precision.
inline void write_trajectory_csv(std::ostream& out, const TrajectoryEstimate& traj) {
  out << "frame,tx,ty,tz,qx,qy,qz,qw\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& p = traj.poses[i];
    const auto q = p.quaternion();
    out << traj.frame_indices[i];
    for (double v : {p.translation.x(), p.translation.y(), p.translation.z(), q.x(), q.y(), q.z(), q.w()})
      out << ',' << detail::fmt17(v);
    out << '\n';
  }
}

inline TrajectoryEstimate read_trajectory_csv(std::istream& in) {
  TrajectoryEstimate traj;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (n == 1 || line.empty()) continue;
    const auto c = detail::split_csv(line);
    if (c.size() != 8) throw ParseError("trajectory row needs 8 columns", n);
    traj.frame_indices.push_back(detail::to_int(c[0], n));
    const Vec3 t(detail::to_double(c[1], n), detail::to_double(c[2], n), detail::to_double(c[3], n));
    traj.poses.push_back(pose_from_quaternion(t, detail::to_double(c[4], n), detail::to_double(c[5], n),
                                              detail::to_double(c[6], n), detail::to_double(c[7], n)));
  }
  return traj;
}

/// CSV `id,x,y,z,n_observations`.
inline void write_landmark_csv(std::ostream& out, const std::vector<MapLandmark>& map) {
  out << "id,x,y,z,n_observations\n";
  for (const auto& l : map) {
    out << l.id << ',' << detail::fmt17(l.position.x()) << ',' << detail::fmt17(l.position.y()) << ','
        << detail::fmt17(l.position.z()) << ',' << l.n_observations << '\n';
  }
}

inline std::vector<MapLandmark> read_landmark_csv(std::istream& in) {
  std::vector<MapLandmark> map;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (n == 1 || line.empty()) continue;
    const auto c = detail::split_csv(line);
    if (c.size() != 5) throw ParseError("landmark row needs 5 columns", n);
    map.push_back({detail::to_int(c[0], n),
                   Vec3(detail::to_double(c[1], n), detail::to_double(c[2], n), detail::to_double(c[3], n)),
                   static_cast<std::size_t>(detail::to_int(c[4], n))});
  }
  return map;
}

}  // namespace seedslam::backend
