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
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "seedslam/assoc/types.hpp"
#include "seedslam/backend/config.hpp"
#include "seedslam/core/errors.hpp"
#include "seedslam/core/types.hpp"
#include "seedslam/geometry/icp.hpp"
#include "seedslam/postprocess/postprocess.hpp"
#include "seedslam/sim/scene.hpp"

namespace seedslam {

/// Everything a run needs. `sim` is only consulted by the simulator.
struct PipelineConfig {
  CameraRig rig;
  assoc::AssocConfig assoc = assoc::AssocConfig::defaults_for(CameraRig{});
  geometry::IcpConfig icp;
  backend::BackendConfig backend;
  postprocess::PostprocessConfig post;
  std::optional<sim::SimConfig> sim;

  void validate() const {
    rig.validate();
    assoc.validate();
    icp.validate();
    backend.validate();
    post.validate();
    if (sim) {
      if (!(sim->rig == rig)) throw ValidationError("sim: rig must equal the top-level rig");
      sim->validate();
    }
  }

  static PipelineConfig defaults() { return {}; }
};

namespace config_detail {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

/// Reads the members of one JSON object, rejecting unknown keys and naming the field path
/// in every error.
class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ValidationError(path_ + ": expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!obj_.contains(key)) return;
    try {
      out = obj_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ValidationError(field(key) + ": wrong type");
    }
  }

  /// Number or null (null means +infinity).
  void get_extended(const char* key, double& out) {
    seen_.insert(key);
    if (!obj_.contains(key)) return;
    const auto& v = obj_.at(key);
    if (v.is_null()) {
      out = std::numeric_limits<double>::infinity();
    } else if (v.is_number()) {
      out = v.get<double>();
    } else {
      throw ValidationError(field(key) + ": expected a number or null");
    }
  }

  void get_vec3(const char* key, Vec3& out) {
    seen_.insert(key);
    if (!obj_.contains(key)) return;
    const auto& v = obj_.at(key);
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number())
      throw ValidationError(field(key) + ": expected an array of 3 numbers");
    out = Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
  }

  bool has(const char* key) const { return obj_.contains(key); }
  const json& child(const char* key) {
    seen_.insert(key);
    return obj_.at(key);
  }
  std::string field(const char* key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& [k, v] : obj_.items())
      if (!seen_.count(k)) throw ValidationError(path_ + "." + k + ": unknown field");
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

inline ojson extended(double v) { return std::isinf(v) && v > 0 ? ojson(nullptr) : ojson(v); }

inline ojson rig_json(const CameraRig& r) {
  return ojson{{"f", r.f},
               {"cx", r.cx},
               {"cy", r.cy},
               {"baseline_m", r.baseline_m},
               {"width_px", r.width_px},
               {"height_px", r.height_px}};
}

inline void read_rig(Reader rd, CameraRig& r) {
  rd.get("f", r.f);
  rd.get("cx", r.cx);
  rd.get("cy", r.cy);
  rd.get("baseline_m", r.baseline_m);
  rd.get("width_px", r.width_px);
  rd.get("height_px", r.height_px);
  rd.finish();
}

}  // namespace config_detail

inline nlohmann::ordered_json config_to_json(const PipelineConfig& c) {
  using config_detail::extended;
  using ojson = nlohmann::ordered_json;
  ojson j;
  j["rig"] = config_detail::rig_json(c.rig);
  j["assoc"] = ojson{{"delta_px", c.assoc.delta_px},
                     {"epsilon_px", c.assoc.epsilon_px},
                     {"r_weight", c.assoc.r_weight},
                     {"cost_filter_threshold", c.assoc.cost_filter_threshold},
                     {"missing_neighbor_penalty", c.assoc.missing_neighbor_penalty},
                     {"one_sided_missing_penalty", c.assoc.one_sided_missing_penalty},
                     {"dummy_cost", c.assoc.dummy_cost},
                     {"symmetric_ratio", c.assoc.symmetric_ratio}};
  const Vec3& d = c.icp.motion_direction;
  j["icp"] = ojson{{"motion_direction", {d.x(), d.y(), d.z()}},
                   {"min_correspondences", c.icp.min_correspondences},
                   {"max_translation_m", c.icp.max_translation_m},
                   {"min_depth_m", c.icp.min_depth_m},
                   {"max_depth_m", c.icp.max_depth_m},
                   {"inlier_gate_m", c.icp.inlier_gate_m},
                   {"inlier_gate_min_m", c.icp.inlier_gate_min_m}};
  const auto& b = c.backend;
  j["backend"] = ojson{{"huber_k", extended(b.huber_k)},
                       {"pixel_sigma", b.pixel_sigma},
                       {"motion_sigma_rot", b.motion_sigma_rot},
                       {"motion_sigma_along", b.motion_sigma_along},
                       {"motion_sigma_perp", b.motion_sigma_perp},
                       {"max_iterations", b.max_iterations},
                       {"convergence_tol", b.convergence_tol},
                       {"optimizer", backend::to_string(b.optimizer)},
                       {"initial_trust_radius", b.initial_trust_radius},
                       {"trust_grow", b.trust_grow},
                       {"trust_shrink", b.trust_shrink},
                       {"gain_grow_threshold", b.gain_grow_threshold},
                       {"gain_shrink_threshold", b.gain_shrink_threshold}};
  j["post"] = ojson{{"dedupe_radius_m", c.post.dedupe_radius_m},
                    {"variance_neighbors", c.post.variance_neighbors},
                    {"variance_threshold_m2", extended(c.post.variance_threshold_m2)},
                    {"fallback_depth", "nearest-stereo-neighbor"}};
  if (c.sim) {
    const auto& s = *c.sim;
    j["sim"] = ojson{{"range_length_m", s.range_length_m},
                     {"n_panicles", s.n_panicles},
                     {"seeds_per_panicle", s.seeds_per_panicle},
                     {"panicle_spread_m", s.panicle_spread_m},
                     {"camera_speed_mps", s.camera_speed_mps},
                     {"frame_rate_hz", s.frame_rate_hz},
                     {"pixel_noise_sigma_px", s.pixel_noise_sigma_px},
                     {"false_negative_rate", s.false_negative_rate},
                     {"false_positive_rate_per_frame", s.false_positive_rate_per_frame},
                     {"rng_seed", s.rng_seed},
                     {"standoff_m", s.standoff_m},
                     {"standoff_jitter_m", s.standoff_jitter_m},
                     {"panicle_height_half_range_m", s.panicle_height_half_range_m},
                     {"panicle_depth_ratio", s.panicle_depth_ratio},
                     {"min_seed_spacing_m", s.min_seed_spacing_m},
                     {"min_visible_depth_m", s.min_visible_depth_m},
                     {"max_visible_depth_m", s.max_visible_depth_m}};
  }
  return j;
}

/// Missing fields keep their defaults; assoc windows default from the rig width.
/// Unknown fields and wrong types are validation errors naming the field path.
inline PipelineConfig config_from_json(const nlohmann::json& j) {
  using config_detail::Reader;
  PipelineConfig c;
  Reader top(j, "config");
  if (top.has("rig")) config_detail::read_rig(Reader(top.child("rig"), "rig"), c.rig);
  c.assoc = assoc::AssocConfig::defaults_for(c.rig);

  if (top.has("assoc")) {
    Reader rd(top.child("assoc"), "assoc");
    rd.get("delta_px", c.assoc.delta_px);
    if (rd.has("delta_px") && !rd.has("epsilon_px")) c.assoc.epsilon_px = c.assoc.delta_px / 8.0;
    rd.get("epsilon_px", c.assoc.epsilon_px);
    rd.get("r_weight", c.assoc.r_weight);
    if (rd.has("r_weight") && !rd.has("cost_filter_threshold"))
      c.assoc.cost_filter_threshold = 4.0 * c.assoc.r_weight + 50.0;
    rd.get("cost_filter_threshold", c.assoc.cost_filter_threshold);
    if (!rd.has("dummy_cost")) c.assoc.dummy_cost = 10.0 * c.assoc.cost_filter_threshold;
    rd.get("missing_neighbor_penalty", c.assoc.missing_neighbor_penalty);
    rd.get("one_sided_missing_penalty", c.assoc.one_sided_missing_penalty);
    rd.get("dummy_cost", c.assoc.dummy_cost);
    rd.get("symmetric_ratio", c.assoc.symmetric_ratio);
    rd.finish();
  }
  if (top.has("icp")) {
    Reader rd(top.child("icp"), "icp");
    rd.get_vec3("motion_direction", c.icp.motion_direction);
    rd.get("min_correspondences", c.icp.min_correspondences);
    rd.get("max_translation_m", c.icp.max_translation_m);
    rd.get("min_depth_m", c.icp.min_depth_m);
    rd.get("max_depth_m", c.icp.max_depth_m);
    rd.get("inlier_gate_m", c.icp.inlier_gate_m);
    rd.get("inlier_gate_min_m", c.icp.inlier_gate_min_m);
    rd.finish();
  }
  if (top.has("backend")) {
    auto& b = c.backend;
    Reader rd(top.child("backend"), "backend");
    rd.get_extended("huber_k", b.huber_k);
    rd.get("pixel_sigma", b.pixel_sigma);
    rd.get("motion_sigma_rot", b.motion_sigma_rot);
    rd.get("motion_sigma_along", b.motion_sigma_along);
    rd.get("motion_sigma_perp", b.motion_sigma_perp);
    rd.get("max_iterations", b.max_iterations);
    rd.get("convergence_tol", b.convergence_tol);
    std::string opt = backend::to_string(b.optimizer);
    rd.get("optimizer", opt);
    b.optimizer = backend::optimizer_kind_from_string(opt);
    rd.get("initial_trust_radius", b.initial_trust_radius);
    rd.get("trust_grow", b.trust_grow);
    rd.get("trust_shrink", b.trust_shrink);
    rd.get("gain_grow_threshold", b.gain_grow_threshold);
    rd.get("gain_shrink_threshold", b.gain_shrink_threshold);
    rd.finish();
  }
  if (top.has("post")) {
    Reader rd(top.child("post"), "post");
    rd.get("dedupe_radius_m", c.post.dedupe_radius_m);
    rd.get("variance_neighbors", c.post.variance_neighbors);
    rd.get_extended("variance_threshold_m2", c.post.variance_threshold_m2);
    std::string fb = "nearest-stereo-neighbor";
    rd.get("fallback_depth", fb);
    if (fb != "nearest-stereo-neighbor")
      throw ValidationError("post.fallback_depth: unknown strategy '" + fb + "'");
    rd.finish();
  }
  if (top.has("sim")) {
    sim::SimConfig s;
    s.rig = c.rig;
    Reader rd(top.child("sim"), "sim");
    rd.get("range_length_m", s.range_length_m);
    rd.get("n_panicles", s.n_panicles);
    rd.get("seeds_per_panicle", s.seeds_per_panicle);
    rd.get("panicle_spread_m", s.panicle_spread_m);
    rd.get("camera_speed_mps", s.camera_speed_mps);
    rd.get("frame_rate_hz", s.frame_rate_hz);
    rd.get("pixel_noise_sigma_px", s.pixel_noise_sigma_px);
    rd.get("false_negative_rate", s.false_negative_rate);
    rd.get("false_positive_rate_per_frame", s.false_positive_rate_per_frame);
    rd.get("rng_seed", s.rng_seed);
    rd.get("standoff_m", s.standoff_m);
    rd.get("standoff_jitter_m", s.standoff_jitter_m);
    rd.get("panicle_height_half_range_m", s.panicle_height_half_range_m);
    rd.get("panicle_depth_ratio", s.panicle_depth_ratio);
    rd.get("min_seed_spacing_m", s.min_seed_spacing_m);
    rd.get("min_visible_depth_m", s.min_visible_depth_m);
    rd.get("max_visible_depth_m", s.max_visible_depth_m);
    rd.finish();
    c.sim = s;
  }
  top.finish();
  c.validate();
  return c;
}

inline PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("config '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

}  // namespace seedslam
