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

#include <functional>
#include <random>
#include <sstream>

#include "test_util.hpp"

using namespace seedslam;
using namespace seedslam::eval;

namespace {

/// Maximum bipartite matching size within `radius`, by exhaustive search over subsets of b.
std::size_t optimal_match_count(const std::vector<Vec3>& a, const std::vector<Vec3>& b, double radius) {
  std::function<std::size_t(std::size_t, unsigned)> go = [&](std::size_t i, unsigned used) -> std::size_t {
    if (i == a.size()) return 0;
    std::size_t best = go(i + 1, used);
    for (std::size_t j = 0; j < b.size(); ++j)
      if (!(used >> j & 1u) && (a[i] - b[j]).norm() <= radius) best = std::max(best, 1 + go(i + 1, used | (1u << j)));
    return best;
  };
  return go(0, 0);
}

sim::GroundTruth line_gt(std::size_t n, double step) {
  sim::GroundTruth gt;
  for (std::size_t k = 0; k < n; ++k) gt.poses.push_back(PoseSE3::from_translation({step * static_cast<double>(k), 0, 0}));
  return gt;
}

TrajectoryEstimate as_estimate(const sim::GroundTruth& gt, std::size_t n) {
  TrajectoryEstimate t;
  for (std::size_t k = 0; k < n; ++k) {
    t.frame_indices.push_back(static_cast<std::int64_t>(k));
    t.poses.push_back(gt.poses[k]);
  }
  return t;
}

}  // namespace

TEST(MaxDistance, HalfwayFailureOnFourMeters) {
  const auto gt = line_gt(51, 0.08);
  EXPECT_NEAR(trajectory_length(gt), 4.0, 1e-12);
  EXPECT_NEAR(max_distance_mapped(as_estimate(gt, 25), 25, gt), 2.0, 1e-12);
  EXPECT_NEAR(max_distance_mapped(as_estimate(gt, 51), std::nullopt, gt), 4.0, 1e-12);
  EXPECT_EQ(max_distance_mapped(as_estimate(gt, 1), 0, gt), 0.0);
  EXPECT_THROW(max_distance_mapped(TrajectoryEstimate{}, std::nullopt, gt), ContractViolation);
}

TEST(Ate, ConstantOffsetClosedForm) {
  for (std::size_t n : {2u, 5u, 51u}) {
    const auto gt = line_gt(n, 0.08);
    auto est = as_estimate(gt, n);
    for (std::size_t k = 1; k < n; ++k) est.poses[k].translation += Vec3(0, 0.01, 0);
    const double expected = 0.01 * std::sqrt(static_cast<double>(n - 1) / static_cast<double>(n));
    EXPECT_NEAR(ate_rmse(est, gt), expected, 1e-15) << "n=" << n;
  }
}

TEST(Ate, AlignsThroughFirstFrame) {
  const auto gt = line_gt(10, 0.08);
  auto est = as_estimate(gt, 10);
  std::mt19937_64 rng(71);
  const PoseSE3 g = fixtures::random_pose(rng);
  for (auto& p : est.poses) p = compose(g, p);
  EXPECT_LT(ate_rmse(est, gt), 1e-12);
}

TEST(Ate, MissingFramesListed) {
  const auto gt = line_gt(5, 0.08);
  auto est = as_estimate(gt, 5);
  est.frame_indices[3] = 7;
  est.frame_indices[4] = 9;
  try {
    ate_rmse(est, gt);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("7, 9"), std::string::npos) << e.what();
  }
}

TEST(GreedyMatch, BoundsAgainstOptimalMatching) {
  std::mt19937_64 rng(72);
  std::uniform_int_distribution<int> n(1, 10);
  for (int t = 0; t < 300; ++t) {
    std::vector<Vec3> a(static_cast<std::size_t>(n(rng))), b(static_cast<std::size_t>(n(rng)));
    for (auto& p : a) p = fixtures::random_vec(rng, 0, 0.05);
    for (auto& p : b) p = fixtures::random_vec(rng, 0, 0.05);
    const auto g = greedy_match_count(a, b, 0.015);
    const auto o = optimal_match_count(a, b, 0.015);
    EXPECT_LE(g, o);
    EXPECT_GE(2 * g, o);
  }
}

TEST(GreedyMatch, EqualsOptimalWhenTruthIsWellSeparated) {
  // Truth points more than 2 radii apart: every estimate can reach at most one of them.
  std::mt19937_64 rng(73);
  std::normal_distribution<double> jitter(0.0, 0.004);
  for (int t = 0; t < 200; ++t) {
    std::vector<Vec3> truth, est;
    for (int i = 0; i < 6; ++i) truth.push_back({0.03 * i, 0, 1});
    for (int i = 0; i < 8; ++i)
      est.push_back(truth[static_cast<std::size_t>(i % 6)] + Vec3(jitter(rng), jitter(rng), jitter(rng)));
    EXPECT_EQ(greedy_match_count(est, truth, 0.01), optimal_match_count(est, truth, 0.01));
  }
}

TEST(GreedyMatch, NearestFirstCanLoseAMatch) {
  // The closest pair a0-b0 leaves a1 with nothing in reach; a0-b1, a1-b0 would match both.
  const std::vector<Vec3> a{{-0.05, 0, 0}, {0.6, 0, 0}};
  const std::vector<Vec3> b{{0.0, 0, 0}, {-0.6, 0, 0}};
  EXPECT_EQ(greedy_match_count(a, b, 0.6), 1u);
  EXPECT_EQ(optimal_match_count(a, b, 0.6), 2u);
}

TEST(LandmarkPr, CountsAndVisibleSubset) {
  sim::GroundTruth gt;
  gt.landmarks = {{0, {0, 0, 1}}, {1, {0.1, 0, 1}}, {2, {0.2, 0, 1}}, {3, {5, 0, 1}}};
  gt.visible = {{0, 1}, {1, 2}};
  PointCloud3D map;
  map.points = {{0.001, 0, 1}, {0.1, 0.002, 1}, {0.5, 0, 1}};
  auto pr = landmark_pr(map, gt, 0.01);
  EXPECT_EQ(pr.matched, 2u);
  EXPECT_DOUBLE_EQ(pr.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(pr.recall, 0.5);
  const auto vis = visible_landmarks(gt, 2);
  EXPECT_EQ(vis, (std::vector<LandmarkId>{0, 1, 2}));
  pr = landmark_pr(map, gt, 0.01, vis);
  EXPECT_DOUBLE_EQ(pr.recall, 2.0 / 3.0);
  EXPECT_EQ(visible_landmarks(gt, 1), (std::vector<LandmarkId>{0, 1}));
  EXPECT_THROW(landmark_pr(map, gt, 0.0), ContractViolation);
}

TEST(RunReport, JsonRoundTrip) {
  RunReport r;
  r.max_distance_mapped_m = 2.4;
  r.range_length_m = 4.0;
  r.fraction_mapped = 0.6;
  r.ate_rmse_m = 0.012;
  r.failure_reason = FailureReason::TooFewMatches;
  r.failure_frame = 30;
  r.failure_detail = "frame 30: only 4 correspondences";
  r.per_frame_match_counts = {0, 150, 140};
  const auto back = report_from_json(nlohmann::json::parse(to_json(r).dump()));
  EXPECT_EQ(back.max_distance_mapped_m, 2.4);
  EXPECT_EQ(back.range_length_m, 4.0);
  EXPECT_EQ(back.ate_rmse_m, 0.012);
  EXPECT_FALSE(back.landmark_precision.has_value());
  EXPECT_EQ(back.failure_reason, FailureReason::TooFewMatches);
  EXPECT_EQ(back.failure_frame, 30);
  EXPECT_EQ(back.per_frame_match_counts, r.per_frame_match_counts);
  EXPECT_THROW(report_from_json(nlohmann::json::parse("{\"fraction_mapped\":1}")), ParseError);
}

TEST(RunReport, CsvHasMeanFractionColumn) {
  std::vector<std::pair<std::string, RunReport>> rows(8);
  for (int i = 0; i < 8; ++i) {
    rows[static_cast<std::size_t>(i)].first = "range" + std::to_string(i);
    rows[static_cast<std::size_t>(i)].second.fraction_mapped = i < 4 ? 1.0 : 0.5;
  }
  std::ostringstream out;
  write_report_csv(out, rows);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kReportCsvHeader);
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    EXPECT_NE(line.find(",0.750000,"), std::string::npos) << line;
  }
  EXPECT_EQ(n, 8);
}
