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

#include <random>
#include <sstream>

#include "test_util.hpp"

using namespace seedslam;

TEST(So3, ExpLogRoundTrip) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const Vec3 w = fixtures::random_vec(rng, -1.5, 1.5);
    EXPECT_LT((so3::log(so3::exp(w)) - w).norm(), 1e-10);
  }
  EXPECT_LT(so3::log(Mat3::Identity()).norm(), 1e-15);
}

TEST(So3, ExpIsRotation) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 50; ++i) {
    const Mat3 r = so3::exp(fixtures::random_vec(rng, -3.0, 3.0));
    EXPECT_LT((r.transpose() * r - Mat3::Identity()).norm(), 1e-12);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
  }
}

TEST(PoseSE3, InverseAndCompose) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const PoseSE3 a = fixtures::random_pose(rng), b = fixtures::random_pose(rng);
    const Vec3 p = fixtures::random_vec(rng, -2.0, 2.0);
    const PoseSE3 id = compose(a, a.inverse());
    EXPECT_LT((id.rotation - Mat3::Identity()).norm(), 1e-12);
    EXPECT_LT(id.translation.norm(), 1e-12);
    EXPECT_LT((compose(a, b).transform(p) - a.transform(b.transform(p))).norm(), 1e-12);
    EXPECT_LT((a.inverse_transform(a.transform(p)) - p).norm(), 1e-12);
    EXPECT_TRUE(a.is_valid());
  }
}

TEST(PoseSE3, ExpOfPureTranslation) {
  Vec6 xi = Vec6::Zero();
  xi.tail<3>() = Vec3(0.08, -0.1, 2.0);
  const PoseSE3 p = PoseSE3::exp(xi);
  EXPECT_EQ(p.rotation, Mat3::Identity());
  EXPECT_LT((p.translation - Vec3(0.08, -0.1, 2.0)).norm(), 1e-15);
}

TEST(PoseSE3, QuaternionRoundTrip) {
  std::mt19937_64 rng(6);
  const PoseSE3 a = fixtures::random_pose(rng);
  const auto q = a.quaternion();
  const PoseSE3 b = pose_from_quaternion(a.translation, q.x(), q.y(), q.z(), q.w());
  EXPECT_LT((a.rotation - b.rotation).norm(), 1e-12);
}

TEST(CameraRig, ValidateRejectsBadFields) {
  CameraRig r;
  EXPECT_NO_THROW(r.validate());
  r.f = 0.0;
  EXPECT_THROW(r.validate(), ValidationError);
  r = CameraRig{};
  r.baseline_m = -0.1;
  EXPECT_THROW(r.validate(), ValidationError);
  r = CameraRig{};
  r.cx = 5000.0;
  EXPECT_THROW(r.validate(), ValidationError);
}

TEST(FailureReason, StringRoundTrip) {
  for (auto r : {FailureReason::None, FailureReason::TooFewMatches, FailureReason::TranslationBound,
                 FailureReason::OptimizerDivergence})
    EXPECT_EQ(failure_reason_from_string(to_string(r)), r);
  EXPECT_THROW(failure_reason_from_string("nope"), Error);
}

TEST(DetectionIo, SimulatorFramesRoundTrip) {
  sim::SimConfig sc;
  sc.range_length_m = 0.4;
  sc.pixel_noise_sigma_px = 0.7;
  sc.false_positive_rate_per_frame = 3.0;
  const auto frames = sim::render_sequence(sim::generate_scene(sc), sc);
  std::stringstream ss;
  write_detection_sequence(ss, frames);
  const auto back = read_detection_sequence(ss, sc.rig);
  ASSERT_EQ(back.size(), frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) EXPECT_EQ(back[i], frames[i]) << "frame " << i;
}

TEST(DetectionIo, SortsByFrameIndexAndSkipsBlankLines) {
  std::istringstream in(
      "{\"frame\":2,\"t\":0.4,\"left\":[],\"right\":[]}\n\n"
      "{\"frame\":0,\"t\":0.0,\"left\":[{\"x\":10,\"y\":20}],\"right\":[{\"x\":5,\"y\":20,\"id\":3}]}\n");
  const auto f = read_detection_sequence(in, CameraRig{});
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f[0].frame_index, 0);
  EXPECT_EQ(f[1].frame_index, 2);
  EXPECT_FALSE(f[0].left[0].id.has_value());
  EXPECT_EQ(*f[0].right[0].id, 3);
}

TEST(DetectionIo, MalformedLineReportsLineNumber) {
  std::istringstream in("{\"frame\":0,\"t\":0,\"left\":[],\"right\":[]}\n{\"frame\":1,\"t\":\n");
  try {
    read_detection_sequence(in, CameraRig{});
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(DetectionIo, MissingFieldsAndBadKeypoints) {
  const CameraRig rig;
  auto parse = [&](const std::string& s) {
    std::istringstream in(s);
    return read_detection_sequence(in, rig);
  };
  EXPECT_THROW(parse("{\"t\":0,\"left\":[],\"right\":[]}"), ParseError);
  EXPECT_THROW(parse("{\"frame\":0,\"left\":[],\"right\":[]}"), ParseError);
  EXPECT_THROW(parse("{\"frame\":0,\"t\":0,\"left\":[]}"), ParseError);
  EXPECT_THROW(parse("{\"frame\":0,\"t\":0,\"left\":[{\"x\":1}],\"right\":[]}"), ParseError);
  EXPECT_THROW(parse("[1,2]"), ParseError);
}

TEST(DetectionIo, OutOfImageAndDuplicateFrames) {
  const CameraRig rig;
  std::istringstream out_of_image("{\"frame\":0,\"t\":0,\"left\":[{\"x\":5000,\"y\":1}],\"right\":[]}");
  EXPECT_THROW(read_detection_sequence(out_of_image, rig), ValidationError);
  std::istringstream dup("{\"frame\":1,\"t\":0,\"left\":[],\"right\":[]}\n{\"frame\":1,\"t\":0,\"left\":[],\"right\":[]}");
  EXPECT_THROW(read_detection_sequence(dup, rig), ValidationError);
}

TEST(DetectionIo, NearDuplicateKeypointsCollapse) {
  std::istringstream in(
      "{\"frame\":0,\"t\":0,\"left\":[{\"x\":100,\"y\":100},{\"x\":100.5,\"y\":100},{\"x\":102,\"y\":100}],"
      "\"right\":[]}");
  const auto f = read_detection_sequence(in, CameraRig{});
  ASSERT_EQ(f[0].left.size(), 2u);
  EXPECT_EQ(f[0].left[1].x, 102.0);
}

TEST(DetectionIo, MissingFileIsIoError) {
  EXPECT_THROW(load_detection_sequence("/nonexistent/detections.jsonl", CameraRig{}), IoError);
}
