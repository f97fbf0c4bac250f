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

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_util.hpp"

using namespace seedslam;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(SEEDSLAM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++n;
  return n;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("seedslam_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    std::ofstream(dir_ / "short.json") << R"({"sim":{"range_length_m":0.48,"pixel_noise_sigma_px":0.5,"false_negative_rate":0.1,"false_positive_rate_per_frame":5}})";
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string p(const std::string& rel) const { return (dir_ / rel).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SimulateWritesDiscretizedSequence) {
  ASSERT_EQ(run("simulate --config " + p("short.json") + " --out " + p("sim") + " --seed 4"), 0);
  EXPECT_EQ(line_count(dir_ / "sim" / "detections.jsonl"), 7u);
  EXPECT_TRUE(fs::exists(dir_ / "sim" / "ground_truth.json"));
  const auto m = nlohmann::json::parse(slurp(dir_ / "sim" / "manifest.json"));
  EXPECT_EQ(m["seeds"]["rng_seed"], 4);
  EXPECT_EQ(m["config"]["sim"]["rng_seed"], 4);
  EXPECT_EQ(m["version"], kVersion);
  EXPECT_TRUE(m["timings_s"].contains("render"));
}

TEST_F(CliTest, SimulateIsByteDeterministic) {
  ASSERT_EQ(run("simulate --config " + p("short.json") + " --out " + p("a") + " --seed 9"), 0);
  ASSERT_EQ(run("simulate --config " + p("short.json") + " --out " + p("b") + " --seed 9"), 0);
  EXPECT_EQ(slurp(dir_ / "a" / "detections.jsonl"), slurp(dir_ / "b" / "detections.jsonl"));
  EXPECT_EQ(slurp(dir_ / "a" / "ground_truth.json"), slurp(dir_ / "b" / "ground_truth.json"));
}

TEST_F(CliTest, ZeroLengthRangeIsOneFrame) {
  ASSERT_EQ(run("simulate --out " + p("z") + " --range-length 0"), 0);
  EXPECT_EQ(line_count(dir_ / "z" / "detections.jsonl"), 1u);
  ASSERT_EQ(run("slam " + p("z/detections.jsonl") + " --out " + p("zr")), 0);
  EXPECT_EQ(line_count(dir_ / "zr" / "trajectory.csv"), 2u);
  EXPECT_EQ(line_count(dir_ / "zr" / "landmarks.csv"), 1u);
}

TEST_F(CliTest, SlamEvalExportRoundTrip) {
  ASSERT_EQ(run("simulate --config " + p("short.json") + " --out " + p("sim")), 0);
  ASSERT_EQ(run("slam " + p("sim/detections.jsonl") + " --config " + p("short.json") + " --out " + p("run") + " --gt " +
                p("sim/ground_truth.json") + " --dump-assignments"),
            0);
  for (const char* f : {"trajectory.csv", "landmarks.csv", "map.ply", "report.json", "manifest.json"})
    EXPECT_TRUE(fs::exists(dir_ / "run" / f)) << f;
  EXPECT_TRUE(fs::exists(dir_ / "run" / "assignments" / "stereo_000000.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "run" / "assignments" / "temporal_000001.csv"));
  EXPECT_FALSE(fs::exists(dir_ / "run" / "assignments" / "temporal_000000.csv"));

  const auto report = eval::report_from_json(nlohmann::json::parse(slurp(dir_ / "run" / "report.json")));
  EXPECT_EQ(report.failure_reason, FailureReason::None);
  EXPECT_DOUBLE_EQ(report.fraction_mapped, 1.0);
  ASSERT_TRUE(report.ate_rmse_m.has_value());
  EXPECT_LT(*report.ate_rmse_m, 0.05);

  ASSERT_EQ(run("eval " + p("run") + " --csv " + p("table.csv")), 0);
  const auto again = eval::report_from_json(nlohmann::json::parse(slurp(dir_ / "run" / "eval_report.json")));
  EXPECT_DOUBLE_EQ(again.fraction_mapped, report.fraction_mapped);
  EXPECT_NEAR(*again.ate_rmse_m, *report.ate_rmse_m, 1e-12);
  EXPECT_NEAR(*again.landmark_recall, *report.landmark_recall, 1e-12);
  EXPECT_EQ(line_count(dir_ / "table.csv"), 2u);

  ASSERT_EQ(run("export-ply " + p("run") + " --out " + p("lm.ply")), 0);
  EXPECT_EQ(slurp(dir_ / "lm.ply").rfind("ply\n", 0), 0u);
}

TEST_F(CliTest, EvalWithoutGroundTruthOmitsAccuracy) {
  ASSERT_EQ(run("simulate --config " + p("short.json") + " --out " + p("sim")), 0);
  ASSERT_EQ(run("slam " + p("sim/detections.jsonl") + " --out " + p("run")), 0);
  ASSERT_EQ(run("eval " + p("run") + " --csv " + p("t.csv")), 0);
  const auto r = eval::report_from_json(nlohmann::json::parse(slurp(dir_ / "run" / "eval_report.json")));
  EXPECT_FALSE(r.ate_rmse_m.has_value());
  EXPECT_FALSE(r.landmark_precision.has_value());
  EXPECT_DOUBLE_EQ(r.fraction_mapped, 1.0);
  EXPECT_GT(r.max_distance_mapped_m, 0.4);
}

TEST_F(CliTest, SlamOutputsAreReproducible) {
  ASSERT_EQ(run("simulate --config " + p("short.json") + " --out " + p("sim")), 0);
  ASSERT_EQ(run("slam " + p("sim/detections.jsonl") + " --out " + p("r1")), 0);
  ASSERT_EQ(run("slam " + p("sim/detections.jsonl") + " --out " + p("r2")), 0);
  for (const char* f : {"trajectory.csv", "landmarks.csv", "map.ply", "report.json"})
    EXPECT_EQ(slurp(dir_ / "r1" / f), slurp(dir_ / "r2" / f)) << f;
}

TEST_F(CliTest, ExitCodes) {
  std::ofstream(dir_ / "bad.json") << R"({"assoc":{"delta_px":"x"}})";
  EXPECT_EQ(run("simulate --config " + p("bad.json") + " --out " + p("o")), 2);
  EXPECT_EQ(run("simulate --config " + p("missing.json") + " --out " + p("o")), 3);
  EXPECT_EQ(run("slam " + p("missing.jsonl") + " --out " + p("o")), 3);
  std::ofstream(dir_ / "broken.jsonl") << "{\"frame\":0,\n";
  EXPECT_EQ(run("slam " + p("broken.jsonl") + " --out " + p("o")), 2);
  EXPECT_EQ(run("eval " + p("nowhere")), 3);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("slam " + p("broken.jsonl") + " --out " + p("o") + " --optimize-stride 0"), 2);
}

TEST_F(CliTest, TrackingFailureStillExitsZero) {
  // Frame 4 of 7 loses every detection.
  ASSERT_EQ(run("simulate --config " + p("short.json") + " --out " + p("sim")), 0);
  std::ifstream in(dir_ / "sim" / "detections.jsonl");
  std::ofstream out(dir_ / "cut.jsonl");
  std::string line;
  for (int k = 0; std::getline(in, line); ++k) {
    if (k == 4) {
      auto j = nlohmann::json::parse(line);
      j["left"] = nlohmann::json::array();
      j["right"] = nlohmann::json::array();
      line = j.dump();
    }
    out << line << "\n";
  }
  out.close();
  ASSERT_EQ(run("slam " + p("cut.jsonl") + " --out " + p("run")), 0);
  const auto r = eval::report_from_json(nlohmann::json::parse(slurp(dir_ / "run" / "report.json")));
  EXPECT_EQ(r.failure_reason, FailureReason::TooFewMatches);
  EXPECT_EQ(r.failure_frame, 4);
  EXPECT_NEAR(r.fraction_mapped, 4.0 / 6.0, 1e-12);
  EXPECT_EQ(line_count(dir_ / "run" / "trajectory.csv"), 5u);
}
