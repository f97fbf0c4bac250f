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

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "seedslam/backend/export.hpp"
#include "seedslam/config.hpp"
#include "seedslam/core/detection_io.hpp"
#include "seedslam/core/errors.hpp"
#include "seedslam/core/version.hpp"
#include "seedslam/eval/metrics.hpp"
#include "seedslam/pipeline/slam_pipeline.hpp"
#include "seedslam/postprocess/postprocess.hpp"
#include "seedslam/sim/ground_truth_io.hpp"
#include "seedslam/sim/scene.hpp"

namespace seedslam::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kConfigError = 2, kIoError = 3 };

inline constexpr const char* kDetectionsFile = "detections.jsonl";
inline constexpr const char* kGroundTruthFile = "ground_truth.json";
inline constexpr const char* kTrajectoryFile = "trajectory.csv";
inline constexpr const char* kLandmarksFile = "landmarks.csv";
inline constexpr const char* kCloudFile = "map.ply";
inline constexpr const char* kReportFile = "report.json";
inline constexpr const char* kEvalReportFile = "eval_report.json";
inline constexpr const char* kManifestFile = "manifest.json";

/// Default landmark match radius for precision/recall, meters.
inline constexpr double kDefaultMatchRadius = 0.01;

/// Enough to reproduce a run: config snapshot, files, seeds, per-stage timings.
struct RunManifest {
  std::string command;
  nlohmann::ordered_json config;
  std::map<std::string, std::string> inputs;
  std::map<std::string, std::string> outputs;
  std::map<std::string, std::uint64_t> seeds;
  std::map<std::string, nlohmann::ordered_json> options;
  std::vector<std::pair<std::string, double>> timings_s;
  std::string version = kVersion;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["version"] = version;
    j["command"] = command;
    j["config"] = config;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    j["seeds"] = seeds;
    j["options"] = options;
    auto t = nlohmann::ordered_json::object();
    for (const auto& [stage, s] : timings_s) t[stage] = s;
    j["timings_s"] = t;
    return j;
  }
};

/// Writes next to the target and renames, so readers never see a partial file.
inline void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for '" + path.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("missing file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir.string() + "'");
}

/// Runs `body` and maps library errors onto the exit-code contract, printing the message.
template <class F>
int guarded(const char* stage, F&& body, std::ostream& err = std::cerr) {
  try {
    return body();
  } catch (const IoError& e) {
    err << "error [" << stage << "]: " << e.what() << '\n';
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    err << "error [" << stage << "]: " << e.what() << '\n';
    return kIoError;
  } catch (const Error& e) {
    err << "error [" << stage << "]: " << e.what() << '\n';
    return kConfigError;
  }
}

inline double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

inline PipelineConfig config_or_default(const std::optional<std::string>& path) {
  return path ? load_config(*path) : PipelineConfig::defaults();
}

// ---------------------------------------------------------------------------------------------
// simulate

struct SimulateOptions {
  std::optional<std::string> config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> range_length_m;
};

/// Detections plus ground-truth sidecar for the config's `sim` section (defaults if absent).
inline int cmd_simulate(const SimulateOptions& opt, std::ostream& log = std::cout) {
  return guarded("simulate", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    PipelineConfig cfg = config_or_default(opt.config_path);
    sim::SimConfig sc = cfg.sim.value_or(sim::SimConfig{});
    sc.rig = cfg.rig;
    if (opt.seed) sc.rng_seed = *opt.seed;
    if (opt.range_length_m) sc.range_length_m = *opt.range_length_m;
    sc.validate();
    cfg.sim = sc;

    const fs::path out(opt.out_dir);
    ensure_dir(out);
    const auto gt = sim::generate_scene(sc);
    const double t_scene = seconds_since(t0);
    const auto t1 = std::chrono::steady_clock::now();
    const auto frames = sim::render_sequence(gt, sc);
    std::ostringstream det;
    write_detection_sequence(det, frames);
    const double t_render = seconds_since(t1);

    write_file_atomic(out / kDetectionsFile, det.str());
    write_file_atomic(out / kGroundTruthFile, sim::ground_truth_to_json(gt).dump(1) + "\n");

    RunManifest m;
    m.command = "simulate";
    m.config = config_to_json(cfg);
    if (opt.config_path) m.inputs["config"] = *opt.config_path;
    m.outputs["detections"] = (out / kDetectionsFile).string();
    m.outputs["ground_truth"] = (out / kGroundTruthFile).string();
    m.seeds["rng_seed"] = sc.rng_seed;
    m.timings_s = {{"scene", t_scene}, {"render", t_render}};
    write_file_atomic(out / kManifestFile, m.to_json().dump(2) + "\n");

    log << "simulated " << frames.size() << " frames, " << gt.landmarks.size() << " seeds -> " << out.string()
        << '\n';
    return static_cast<int>(kOk);
  });
}

// ---------------------------------------------------------------------------------------------
// reports

/// Metrics of a finished run. Without ground truth the distance is measured along the
/// estimated trajectory and ATE / precision / recall stay empty.
inline eval::RunReport make_report(const TrajectoryEstimate& traj, const std::vector<backend::MapLandmark>& landmarks,
                                   FailureReason reason, std::optional<std::int64_t> failure_frame,
                                   const std::string& detail, const std::vector<std::size_t>& match_counts,
                                   std::size_t n_input_frames, const sim::GroundTruth* gt,
                                   double match_radius = kDefaultMatchRadius) {
  eval::RunReport r;
  r.failure_reason = reason;
  r.failure_frame = failure_frame;
  r.failure_detail = detail;
  r.per_frame_match_counts = match_counts;
  if (gt) {
    const double length = eval::trajectory_length(*gt);
    r.range_length_m = length;
    r.max_distance_mapped_m = traj.empty() ? 0.0 : eval::max_distance_mapped(traj, failure_frame, *gt);
    r.fraction_mapped = length > 0.0 ? r.max_distance_mapped_m / length : (failure_frame ? 0.0 : 1.0);
    if (!traj.empty()) {
      r.ate_rmse_m = eval::ate_rmse(traj, *gt);
      PointCloud3D map;
      map.frame = CloudFrame::World;
      for (const auto& l : landmarks) map.points.push_back(l.position);
      const auto visible = eval::visible_landmarks(*gt, traj.size());
      const auto pr = eval::landmark_pr(map, *gt, match_radius, visible);
      r.landmark_precision = pr.precision;
      r.landmark_recall = pr.recall;
    }
    return r;
  }
  double length = 0.0;
  for (std::size_t k = 1; k < traj.size(); ++k)
    length += (traj.poses[k].translation - traj.poses[k - 1].translation).norm();
  r.max_distance_mapped_m = length;
  if (!failure_frame) {
    r.fraction_mapped = 1.0;
  } else if (n_input_frames > 1) {
    r.fraction_mapped = static_cast<double>(*failure_frame) / static_cast<double>(n_input_frames - 1);
  }
  return r;
}

// ---------------------------------------------------------------------------------------------
// slam

struct SlamOptions {
  std::string detections_path;
  std::optional<std::string> config_path;
  std::string out_dir;
  std::optional<std::string> ground_truth_path;
  std::size_t optimize_stride = 1;
  bool dump_assignments = false;
  std::optional<double> variance_threshold_m2;
  double match_radius_m = kDefaultMatchRadius;
  std::optional<std::uint64_t> seed;
};

inline std::string frame_tag(std::int64_t frame) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06lld", static_cast<long long>(frame));
  return buf;
}

/// Full pipeline on a detection file. A tracking failure still exits 0; the report says why.
inline int cmd_slam(const SlamOptions& opt, std::ostream& log = std::cout) {
  return guarded("slam", [&] {
    PipelineConfig cfg = config_or_default(opt.config_path);
    if (opt.variance_threshold_m2) {
      cfg.post.variance_threshold_m2 = *opt.variance_threshold_m2;
      cfg.post.validate();
    }
    if (opt.optimize_stride == 0) throw ValidationError("--optimize-stride: must be >= 1");
    const fs::path out(opt.out_dir);
    ensure_dir(out);

    auto t0 = std::chrono::steady_clock::now();
    const auto frames = load_detection_sequence(opt.detections_path, cfg.rig);
    std::optional<sim::GroundTruth> gt;
    if (opt.ground_truth_path) gt = sim::load_ground_truth(*opt.ground_truth_path);
    const double t_load = seconds_since(t0);

    pipeline::PipelineOptions popt;
    popt.optimize_stride = opt.optimize_stride;
    const auto res = pipeline::run_pipeline(frames, cfg, popt);

    t0 = std::chrono::steady_clock::now();
    std::ostringstream traj, lms, ply;
    backend::write_trajectory_csv(traj, res.trajectory);
    backend::write_landmark_csv(lms, res.landmarks);
    postprocess::write_ply(ply, res.cloud);
    const auto report = make_report(res.trajectory, res.landmarks, res.failure_reason, res.failure_frame,
                                    res.failure_detail, res.per_frame_match_counts, frames.size(),
                                    gt ? &*gt : nullptr, opt.match_radius_m);
    write_file_atomic(out / kTrajectoryFile, traj.str());
    write_file_atomic(out / kLandmarksFile, lms.str());
    write_file_atomic(out / kCloudFile, ply.str());
    write_file_atomic(out / kReportFile, eval::to_json(report).dump(2) + "\n");

    RunManifest m;
    m.command = "slam";
    m.config = config_to_json(cfg);
    m.inputs["detections"] = opt.detections_path;
    if (opt.config_path) m.inputs["config"] = *opt.config_path;
    if (opt.ground_truth_path) m.inputs["ground_truth"] = *opt.ground_truth_path;
    m.outputs["trajectory"] = (out / kTrajectoryFile).string();
    m.outputs["landmarks"] = (out / kLandmarksFile).string();
    m.outputs["cloud"] = (out / kCloudFile).string();
    m.outputs["report"] = (out / kReportFile).string();
    m.options["optimize_stride"] = opt.optimize_stride;
    m.options["dump_assignments"] = opt.dump_assignments;
    m.options["match_radius_m"] = opt.match_radius_m;
    if (opt.seed) m.seeds["seed"] = *opt.seed;
    if (cfg.sim) m.seeds["sim.rng_seed"] = cfg.sim->rng_seed;

    if (opt.dump_assignments) {
      const fs::path dir = out / "assignments";
      ensure_dir(dir);
      for (const auto& rec : res.records) {
        std::ostringstream s, t;
        assoc::write_assignment_csv(s, rec.stereo);
        write_file_atomic(dir / ("stereo_" + frame_tag(rec.frame_index) + ".csv"), s.str());
        if (rec.frame_index != res.records.front().frame_index) {
          assoc::write_assignment_csv(t, rec.temporal);
          write_file_atomic(dir / ("temporal_" + frame_tag(rec.frame_index) + ".csv"), t.str());
        }
      }
      m.outputs["assignments"] = dir.string();
    }
    const double t_write = seconds_since(t0);
    m.timings_s = {{"load", t_load},
                   {"frontend", res.seconds_frontend},
                   {"backend", res.seconds_backend},
                   {"postprocess", res.seconds_postprocess},
                   {"write", t_write}};
    write_file_atomic(out / kManifestFile, m.to_json().dump(2) + "\n");

    log << "tracked " << res.trajectory.size() << "/" << frames.size() << " frames, "
        << res.landmarks.size() << " landmarks, " << res.cloud.size() << " cloud points";
    if (res.failure_reason != FailureReason::None) log << "; stopped: " << res.failure_detail;
    log << '\n';
    if (!res.variance_warning.empty()) log << "warning: " << res.variance_warning << '\n';
    if (res.densify_skipped) log << "densify skipped " << res.densify_skipped << " centers\n";
    return static_cast<int>(kOk);
  });
}

// ---------------------------------------------------------------------------------------------
// eval

struct EvalOptions {
  std::vector<std::string> run_dirs;
  /// Paired with run_dirs by position; when empty the path recorded in a run's manifest is used.
  std::vector<std::string> ground_truth_paths;
  std::optional<std::string> csv_path;
  double match_radius_m = kDefaultMatchRadius;
};

/// Recomputes one run's report from its artifacts.
inline eval::RunReport evaluate_run(const fs::path& run, const std::optional<std::string>& gt_path,
                                    double match_radius) {
  for (const char* f : {kTrajectoryFile, kLandmarksFile, kReportFile})
    if (!fs::exists(run / f)) throw IoError("run '" + run.string() + "' is missing " + f);
  std::istringstream traj_in(read_file(run / kTrajectoryFile));
  std::istringstream lm_in(read_file(run / kLandmarksFile));
  const auto traj = backend::read_trajectory_csv(traj_in);
  const auto landmarks = backend::read_landmark_csv(lm_in);
  nlohmann::json slam_report;
  try {
    slam_report = nlohmann::json::parse(read_file(run / kReportFile));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("report '" + (run / kReportFile).string() + "': " + e.what());
  }
  const auto prior = eval::report_from_json(slam_report);

  std::optional<sim::GroundTruth> gt;
  if (gt_path) gt = sim::load_ground_truth(*gt_path);
  std::size_t n_frames = traj.size();
  if (prior.failure_frame && prior.fraction_mapped > 0.0)
    n_frames = static_cast<std::size_t>(std::llround(static_cast<double>(*prior.failure_frame) / prior.fraction_mapped)) + 1;
  return make_report(traj, landmarks, prior.failure_reason, prior.failure_frame, prior.failure_detail,
                     prior.per_frame_match_counts, n_frames, gt ? &*gt : nullptr, match_radius);
}

inline std::optional<std::string> manifest_ground_truth(const fs::path& run) {
  if (!fs::exists(run / kManifestFile)) return std::nullopt;
  try {
    const auto j = nlohmann::json::parse(read_file(run / kManifestFile));
    if (j.contains("inputs") && j["inputs"].contains("ground_truth"))
      return j["inputs"]["ground_truth"].get<std::string>();
  } catch (const nlohmann::json::exception&) {
  }
  return std::nullopt;
}

/// Writes `eval_report.json` into every run directory and one CSV table over all runs.
inline int cmd_eval(const EvalOptions& opt, std::ostream& log = std::cout) {
  return guarded("eval", [&] {
    if (opt.run_dirs.empty()) throw ValidationError("eval: no run directories given");
    if (!opt.ground_truth_paths.empty() && opt.ground_truth_paths.size() != opt.run_dirs.size())
      throw ValidationError("eval: give one --gt per run directory");
    std::vector<std::pair<std::string, eval::RunReport>> rows;
    for (std::size_t i = 0; i < opt.run_dirs.size(); ++i) {
      const fs::path run(opt.run_dirs[i]);
      const auto gt = opt.ground_truth_paths.empty() ? manifest_ground_truth(run)
                                                     : std::optional<std::string>(opt.ground_truth_paths[i]);
      const auto report = evaluate_run(run, gt, opt.match_radius_m);
      write_file_atomic(run / kEvalReportFile, eval::to_json(report).dump(2) + "\n");
      rows.emplace_back(run.filename().empty() ? run.parent_path().filename().string() : run.filename().string(),
                        report);
    }
    std::ostringstream csv;
    eval::write_report_csv(csv, rows);
    if (opt.csv_path) {
      write_file_atomic(*opt.csv_path, csv.str());
    } else {
      log << csv.str();
    }
    return static_cast<int>(kOk);
  });
}

// ---------------------------------------------------------------------------------------------
// export-ply

struct ExportPlyOptions {
  std::string run_dir;
  std::optional<std::string> config_path;
  std::string out_path;
  std::optional<double> variance_threshold_m2;
  /// Skip dedupe and variance filtering.
  bool raw = false;
};

/// Sparse landmark map of a run as PLY, optionally re-cleaned with other filter settings.
inline int cmd_export_ply(const ExportPlyOptions& opt, std::ostream& log = std::cout) {
  return guarded("export-ply", [&] {
    PipelineConfig cfg = config_or_default(opt.config_path);
    if (opt.variance_threshold_m2) {
      cfg.post.variance_threshold_m2 = *opt.variance_threshold_m2;
      cfg.post.validate();
    }
    const fs::path run(opt.run_dir);
    std::istringstream in(read_file(run / kLandmarksFile));
    const auto landmarks = backend::read_landmark_csv(in);
    PointCloud3D cloud;
    cloud.frame = CloudFrame::World;
    for (const auto& l : landmarks) cloud.points.push_back(l.position);
    std::string warning;
    if (!opt.raw) cloud = postprocess::variance_filter(postprocess::dedupe(cloud, cfg.post), cfg.post, &warning);
    std::ostringstream ply;
    postprocess::write_ply(ply, cloud);
    write_file_atomic(opt.out_path, ply.str());
    if (!warning.empty()) log << "warning: " << warning << '\n';
    log << "wrote " << cloud.size() << " points to " << opt.out_path << '\n';
    return static_cast<int>(kOk);
  });
}

}  // namespace seedslam::cli
