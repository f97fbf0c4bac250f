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

#include <cmath>
#include <map>
#include <sstream>

#include "test_util.hpp"

using namespace seedslam;
using namespace seedslam::sim;

TEST(SimConfig, FrameCountFollowsDiscretization) {
  SimConfig c;
  EXPECT_EQ(c.n_frames(), static_cast<std::size_t>(std::floor(4.0 / (0.4 / 5.0))) + 1);
  EXPECT_EQ(c.n_frames(), 51u);
  c.range_length_m = 0.0;
  EXPECT_EQ(c.n_frames(), 1u);
  c.range_length_m = 0.1;
  EXPECT_EQ(c.n_frames(), 2u);
  EXPECT_EQ(generate_scene(c).n_frames(), 2u);
}

TEST(SimConfig, Validation) {
  SimConfig c;
  EXPECT_NO_THROW(c.validate());
  c.false_negative_rate = 1.5;
  EXPECT_THROW(c.validate(), ValidationError);
  c = SimConfig{};
  c.standoff_m = 0.05;
  EXPECT_THROW(c.validate(), ValidationError);
  c = SimConfig{};
  c.frame_rate_hz = 0.0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = SimConfig{};
  c.false_negative_rate = 1.0;
  EXPECT_NO_THROW(c.validate());
}

TEST(Scene, CountAndBoundingBox) {
  SimConfig c;
  c.n_panicles = 10;
  c.seeds_per_panicle = 50;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    c.rng_seed = seed;
    const auto gt = generate_scene(c);
    EXPECT_EQ(gt.landmarks.size(), 500u);
    const auto box = row_bounding_box(c);
    for (const auto& [id, p] : gt.landmarks) EXPECT_TRUE(box.contains(p)) << id;
  }
}

TEST(Scene, MinimumSeedSpacing) {
  SimConfig c;
  c.range_length_m = 1.0;
  const auto gt = generate_scene(c);
  std::vector<Vec3> pts;
  for (const auto& [id, p] : gt.landmarks) pts.push_back(p);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) EXPECT_GE((pts[i] - pts[j]).norm(), c.min_seed_spacing_m);
}

TEST(Scene, PlanarVariantKeepsOneDepth) {
  const auto c = fixtures::planar_scene(2);
  for (const auto& [id, p] : generate_scene(c).landmarks) EXPECT_EQ(p.z(), c.standoff_m);
}

TEST(Scene, TrajectoryIsUniformAlongX) {
  SimConfig c;
  const auto gt = generate_scene(c);
  for (std::size_t k = 0; k < gt.n_frames(); ++k) {
    EXPECT_NEAR(gt.poses[k].translation.x(), 0.08 * static_cast<double>(k), 1e-12);
    EXPECT_EQ(gt.poses[k].translation.y(), 0.0);
    EXPECT_EQ(gt.poses[k].rotation, Mat3::Identity());
    EXPECT_NEAR(gt.timestamps[k], 0.2 * static_cast<double>(k), 1e-12);
  }
}

TEST(Render, ZeroNoiseMatchesVisibilityAndEpipolarRows) {
  SimConfig c;
  c.range_length_m = 0.8;
  const auto gt = generate_scene(c);
  const auto frames = render_sequence(gt, c);
  for (std::size_t k = 0; k < frames.size(); ++k) {
    std::vector<LandmarkId> left_ids, right_ids;
    for (const auto& p : frames[k].left) left_ids.push_back(*p.id);
    for (const auto& p : frames[k].right) right_ids.push_back(*p.id);
    std::sort(left_ids.begin(), left_ids.end());
    std::sort(right_ids.begin(), right_ids.end());
    // Sub-pixel coincidences are merged, so ids can only go missing, never appear.
    EXPECT_LE(left_ids.size(), gt.visible[k].size());
    EXPECT_TRUE(std::includes(gt.visible[k].begin(), gt.visible[k].end(), left_ids.begin(), left_ids.end()));
    EXPECT_GE(static_cast<double>(left_ids.size()), 0.97 * static_cast<double>(gt.visible[k].size()));
    for (const auto& [i, j] : fixtures::id_pairs(frames[k].left, frames[k].right)) {
      EXPECT_EQ(frames[k].left[i].y, frames[k].right[j].y);
      EXPECT_GT(frames[k].left[i].x, frames[k].right[j].x);
    }
  }
}

TEST(Render, DeterministicPerSeed) {
  SimConfig c;
  c.range_length_m = 0.5;
  c.pixel_noise_sigma_px = 1.0;
  c.false_negative_rate = 0.1;
  c.false_positive_rate_per_frame = 5.0;
  const auto a = render_sequence(generate_scene(c), c);
  const auto b = render_sequence(generate_scene(c), c);
  EXPECT_EQ(a, b);
  std::ostringstream sa, sb;
  write_detection_sequence(sa, a);
  write_detection_sequence(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  c.rng_seed = 2;
  EXPECT_NE(render_sequence(generate_scene(c), c), a);
}

TEST(Render, FramesIndependentOfRenderOrder) {
  SimConfig c;
  c.range_length_m = 0.4;
  c.pixel_noise_sigma_px = 0.5;
  const auto gt = generate_scene(c);
  const auto seq = render_sequence(gt, c);
  EXPECT_EQ(render_frame(gt, 3, c), seq[3]);
  EXPECT_THROW(render_frame(gt, 99, c), ContractViolation);
}

TEST(Render, HorizontalTemporalDisplacement) {
  // Pure x motion: vertical offset of a seed between frames is the difference of two
  // independent noise draws, sigma * sqrt(2).
  SimConfig c;
  c.pixel_noise_sigma_px = 0.5;
  c.range_length_m = 2.0;
  const auto frames = render_sequence(generate_scene(c), c);
  std::size_t total = 0, within = 0;
  const double bound = 3.0 * std::sqrt(2.0) * c.pixel_noise_sigma_px;
  for (std::size_t k = 1; k < frames.size(); ++k) {
    for (const auto& [i, j] : fixtures::id_pairs(frames[k - 1].left, frames[k].left)) {
      ++total;
      const double dy = frames[k].left[j].y - frames[k - 1].left[i].y;
      const double dx = frames[k].left[j].x - frames[k - 1].left[i].x;
      if (std::abs(dy) <= bound) ++within;
      EXPECT_LT(dx, 0.0);
    }
  }
  ASSERT_GT(total, 1000u);
  EXPECT_GE(static_cast<double>(within) / static_cast<double>(total), 0.997 - 0.002);
}

TEST(Render, CorruptionRates) {
  SimConfig c;
  c.false_negative_rate = 0.2;
  c.false_positive_rate_per_frame = 6.0;
  const auto gt = generate_scene(c);
  const auto frames = render_sequence(gt, c);
  double visible = 0, detected = 0, spurious = 0;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    visible += static_cast<double>(gt.visible[k].size());
    for (const auto& p : frames[k].left) (p.id ? detected : spurious) += 1.0;
  }
  const double n = static_cast<double>(frames.size());
  EXPECT_NEAR(detected / visible, 0.8, 0.02);
  EXPECT_NEAR(spurious / n, 6.0, 1.0);

  c.false_negative_rate = 1.0;
  c.false_positive_rate_per_frame = 0.0;
  for (const auto& f : render_sequence(gt, c)) {
    EXPECT_TRUE(f.left.empty());
    EXPECT_TRUE(f.right.empty());
  }
}

TEST(Render, NoiseStatistics) {
  SimConfig c;
  c.pixel_noise_sigma_px = 0.8;
  c.range_length_m = 1.0;
  const auto gt = generate_scene(c);
  const auto frames = render_sequence(gt, c);
  double sum = 0, sq = 0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    for (const auto& p : frames[k].left) {
      const auto m = geometry::project(gt.poses[k].inverse_transform(gt.landmarks.at(*p.id)), c.rig);
      sum += p.x - m.x;
      sq += (p.x - m.x) * (p.x - m.x);
      ++n;
    }
  }
  const double mean = sum / static_cast<double>(n);
  EXPECT_NEAR(mean, 0.0, 0.05);
  EXPECT_NEAR(std::sqrt(sq / static_cast<double>(n) - mean * mean), 0.8, 0.05);
}

TEST(GroundTruthIo, JsonRoundTrip) {
  SimConfig c;
  c.range_length_m = 0.5;
  const auto gt = generate_scene(c);
  const auto back = ground_truth_from_json(nlohmann::json::parse(ground_truth_to_json(gt).dump()));
  EXPECT_EQ(back.rig, gt.rig);
  EXPECT_EQ(back.range_length_m, gt.range_length_m);
  EXPECT_EQ(back.landmarks, gt.landmarks);
  EXPECT_EQ(back.visible, gt.visible);
  ASSERT_EQ(back.poses.size(), gt.poses.size());
  for (std::size_t k = 0; k < gt.poses.size(); ++k) EXPECT_EQ(back.poses[k].translation, gt.poses[k].translation);
  EXPECT_THROW(load_ground_truth("/nonexistent/gt.json"), IoError);
  EXPECT_THROW(ground_truth_from_json(nlohmann::json::parse("{\"rig\":1}")), ParseError);
}
