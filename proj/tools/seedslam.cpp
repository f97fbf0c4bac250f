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

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "seedslam/cli/commands.hpp"

namespace cli = seedslam::cli;

int main(int argc, char** argv) {
  CLI::App app{"Stereo seed mapping: simulate, slam, eval, export-ply"};
  app.set_version_flag("--version", std::string(seedslam::kVersion));
  app.require_subcommand(1);

  cli::SimulateOptions sim;
  std::string sim_config;
  std::uint64_t sim_seed = 0;
  double sim_length = 0.0;
  auto* s = app.add_subcommand("simulate", "generate a synthetic range: detections plus ground truth");
  s->add_option("--config", sim_config, "pipeline config JSON (its sim section is used)");
  s->add_option("--out", sim.out_dir, "output directory")->required();
  auto* s_seed = s->add_option("--seed", sim_seed, "overrides sim.rng_seed");
  auto* s_len = s->add_option("--range-length", sim_length, "overrides sim.range_length_m");

  cli::SlamOptions slam;
  std::string slam_config, slam_gt;
  double slam_var = 0.0;
  std::uint64_t slam_seed = 0;
  auto* m = app.add_subcommand("slam", "run the mapping pipeline on a detection file");
  m->add_option("detections", slam.detections_path, "detections JSONL")->required();
  m->add_option("--config", slam_config, "pipeline config JSON");
  m->add_option("--out", slam.out_dir, "output directory")->required();
  m->add_option("--gt", slam_gt, "ground truth JSON, enables ATE and precision/recall in the report");
  m->add_option("--optimize-stride", slam.optimize_stride, "batch-optimize every k frames")->capture_default_str();
  m->add_flag("--dump-assignments", slam.dump_assignments, "write per-frame stereo/temporal assignments");
  auto* m_var = m->add_option("--variance-threshold", slam_var, "overrides post.variance_threshold_m2");
  m->add_option("--match-radius", slam.match_radius_m, "landmark match radius, m")->capture_default_str();
  auto* m_seed = m->add_option("--seed", slam_seed, "recorded in the manifest; the pipeline itself draws no random numbers");

  cli::EvalOptions ev;
  std::string ev_csv;
  auto* e = app.add_subcommand("eval", "recompute run reports against ground truth");
  e->add_option("runs", ev.run_dirs, "run directories")->required();
  e->add_option("--gt", ev.ground_truth_paths, "ground truth per run (default: from each run's manifest)");
  e->add_option("--csv", ev_csv, "write the table here instead of stdout");
  e->add_option("--match-radius", ev.match_radius_m, "landmark match radius, m")->capture_default_str();

  cli::ExportPlyOptions ex;
  std::string ex_config;
  double ex_var = 0.0;
  auto* x = app.add_subcommand("export-ply", "write a run's landmark map as PLY");
  x->add_option("run", ex.run_dir, "run directory")->required();
  x->add_option("--config", ex_config, "pipeline config JSON (post section)");
  x->add_option("--out", ex.out_path, "output PLY path")->required();
  auto* x_var = x->add_option("--variance-threshold", ex_var, "overrides post.variance_threshold_m2");
  x->add_flag("--raw", ex.raw, "skip dedupe and variance filtering");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? 0 : static_cast<int>(cli::kConfigError);
  }

  auto opt_str = [](const std::string& v) { return v.empty() ? std::nullopt : std::optional<std::string>(v); };
  if (s->parsed()) {
    sim.config_path = opt_str(sim_config);
    if (s_seed->count()) sim.seed = sim_seed;
    if (s_len->count()) sim.range_length_m = sim_length;
    return cli::cmd_simulate(sim);
  }
  if (m->parsed()) {
    slam.config_path = opt_str(slam_config);
    slam.ground_truth_path = opt_str(slam_gt);
    if (m_var->count()) slam.variance_threshold_m2 = slam_var;
    if (m_seed->count()) slam.seed = slam_seed;
    return cli::cmd_slam(slam);
  }
  if (e->parsed()) {
    ev.csv_path = opt_str(ev_csv);
    return cli::cmd_eval(ev);
  }
  ex.config_path = opt_str(ex_config);
  if (x_var->count()) ex.variance_threshold_m2 = ex_var;
  return cli::cmd_export_ply(ex);
}
