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

// Simulate a short noisy range, map it, and score the result.
#include <iostream>

#include "seedslam/seedslam.hpp"

int main() {
  using namespace seedslam;

  sim::SimConfig sc;
  sc.range_length_m = 1.0;
  sc.pixel_noise_sigma_px = 0.5;
  sc.false_negative_rate = 0.1;
  sc.false_positive_rate_per_frame = 5.0;
  sc.rng_seed = 7;

  const auto gt = sim::generate_scene(sc);
  const auto frames = sim::render_sequence(gt, sc);

  PipelineConfig cfg = PipelineConfig::defaults();
  cfg.rig = sc.rig;
  const auto res = pipeline::run_pipeline(frames, cfg);

  const auto map = [&] {
    PointCloud3D c;
    c.frame = CloudFrame::World;
    for (const auto& l : res.landmarks) c.points.push_back(l.position);
    return c;
  }();
  const auto pr = eval::landmark_pr(map, gt, 0.01, eval::visible_landmarks(gt, res.trajectory.size()));

  std::cout << "frames tracked  " << res.trajectory.size() << " / " << frames.size() << '\n'
            << "failure         " << to_string(res.failure_reason) << '\n'
            << "ATE rmse (m)    " << eval::ate_rmse(res.trajectory, gt) << '\n'
            << "landmarks       " << res.landmarks.size() << " (precision " << pr.precision << ", recall "
            << pr.recall << ")\n"
            << "cloud points    " << res.cloud.size() << '\n';
  return 0;
}
