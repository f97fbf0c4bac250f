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
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "seedslam/core/errors.hpp"
#include "seedslam/core/types.hpp"

namespace seedslam {

namespace detail {

inline std::vector<Keypoint2D> parse_keypoints(const nlohmann::json& arr, const char* side,
                                               std::size_t line) {
  if (!arr.is_array()) throw ParseError(std::string("'") + side + "' must be an array", line);
  std::vector<Keypoint2D> out;
  out.reserve(arr.size());
  for (const auto& kp : arr) {
    if (!kp.is_object() || !kp.contains("x") || !kp.contains("y") || !kp["x"].is_number() ||
        !kp["y"].is_number()) {
      throw ParseError(std::string("keypoint in '") + side + "' needs numeric x and y", line);
    }
    Keypoint2D k{kp["x"].get<double>(), kp["y"].get<double>(), std::nullopt};
    if (auto it = kp.find("id"); it != kp.end() && !it->is_null()) {
      if (!it->is_number_integer()) throw ParseError("keypoint id must be an integer or null", line);
      k.id = it->get<LandmarkId>();
    }
    out.push_back(k);
  }
  return out;
}

/// Drops keypoints closer than 1 px to an earlier keypoint of the same image.
inline void drop_exact_duplicates(std::vector<Keypoint2D>& kps) {
  std::vector<Keypoint2D> kept;
  kept.reserve(kps.size());
  for (const auto& k : kps) {
    const bool dup = std::any_of(kept.begin(), kept.end(), [&](const Keypoint2D& o) {
      return std::hypot(o.x - k.x, o.y - k.y) < 1.0;
    });
    if (!dup) kept.push_back(k);
  }
  kps = std::move(kept);
}

inline void validate_bounds(const DetectionFrame& f, const CameraRig& rig) {
  auto check = [&](const std::vector<Keypoint2D>& kps, const char* side) {
    for (std::size_t i = 0; i < kps.size(); ++i) {
      if (!std::isfinite(kps[i].x) || !std::isfinite(kps[i].y) || !rig.contains(kps[i].x, kps[i].y)) {
        std::ostringstream msg;
        msg << "frame " << f.frame_index << ": " << side << " keypoint " << i << " at (" << kps[i].x
            << ", " << kps[i].y << ") is outside the " << rig.width_px << "x" << rig.height_px
            << " image";
        throw ValidationError(msg.str());
      }
    }
  };
  check(f.left, "left");
  check(f.right, "right");
}

inline nlohmann::ordered_json keypoints_to_json(const std::vector<Keypoint2D>& kps) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& k : kps) {
    nlohmann::ordered_json o;
    o["x"] = k.x;
    o["y"] = k.y;
    o["id"] = k.id ? nlohmann::ordered_json(*k.id) : nlohmann::ordered_json(nullptr);
    arr.push_back(std::move(o));
  }
  return arr;
}

}  // namespace detail

/// Reads a JSON-Lines detection sequence. Blank lines are ignored.
inline std::vector<DetectionFrame> read_detection_sequence(std::istream& in, const CameraRig& rig) {
  std::vector<DetectionFrame> frames;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), line);
    }
    if (!j.is_object()) throw ParseError("expected a JSON object", line);
    if (!j.contains("frame") || !j["frame"].is_number_integer())
      throw ParseError("missing integer 'frame'", line);
    if (!j.contains("t") || !j["t"].is_number()) throw ParseError("missing numeric 't'", line);
    if (!j.contains("left") || !j.contains("right"))
      throw ParseError("missing 'left' or 'right'", line);

    DetectionFrame f;
    f.frame_index = j["frame"].get<std::int64_t>();
    f.timestamp = j["t"].get<double>();
    if (f.frame_index < 0) throw ValidationError("line " + std::to_string(line) + ": negative frame index");
    f.left = detail::parse_keypoints(j["left"], "left", line);
    f.right = detail::parse_keypoints(j["right"], "right", line);
    detail::validate_bounds(f, rig);
    detail::drop_exact_duplicates(f.left);
    detail::drop_exact_duplicates(f.right);
    frames.push_back(std::move(f));
  }

  std::stable_sort(frames.begin(), frames.end(), [](const auto& a, const auto& b) {
    return a.frame_index < b.frame_index;
  });
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (frames[i].frame_index == frames[i - 1].frame_index)
      throw ValidationError("duplicate frame index " + std::to_string(frames[i].frame_index));
  }
  return frames;
}

inline std::vector<DetectionFrame> load_detection_sequence(const std::string& path,
                                                           const CameraRig& rig) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open detection file '" + path + "'");
  return read_detection_sequence(in, rig);
}

/// Canonical single-line encoding of one frame (key order frame, t, left, right).
inline std::string format_detection_frame(const DetectionFrame& f) {
  nlohmann::ordered_json j;
  j["frame"] = f.frame_index;
  j["t"] = f.timestamp;
  j["left"] = detail::keypoints_to_json(f.left);
  j["right"] = detail::keypoints_to_json(f.right);
  return j.dump();
}

inline void write_detection_sequence(std::ostream& out, const std::vector<DetectionFrame>& frames) {
  for (const auto& f : frames) out << format_detection_frame(f) << '\n';
}

inline void save_detection_sequence(const std::string& path, const std::vector<DetectionFrame>& frames) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write detection file '" + path + "'");
  write_detection_sequence(out, frames);
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace seedslam
