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

#include <cstddef>
#include <vector>

#include "seedslam/core/errors.hpp"
#include "seedslam/core/types.hpp"

namespace seedslam::assoc {

struct AssocConfig {
  double delta_px = 4096.0 / 20.0;    // neighbor window extent
  double epsilon_px = 4096.0 / 160.0; // neighbor window tolerance
  double r_weight = 10.0;
  double cost_filter_threshold = 90.0;
  /// Term value (before r) when both neighbor sets are empty.
  double missing_neighbor_penalty = 1.0;
  /// Term value (before r) when exactly one neighbor set is empty.
  double one_sided_missing_penalty = 4.0;
  double dummy_cost = 1000.0;
  bool symmetric_ratio = false;

  /// Windows scale with image width; threshold admits perfect structure (4r) plus 50 px of slack.
  static AssocConfig defaults_for(const CameraRig& rig) {
    AssocConfig c;
    c.delta_px = rig.width_px / 20.0;
    c.epsilon_px = c.delta_px / 8.0;
    c.r_weight = 10.0;
    c.cost_filter_threshold = 4.0 * c.r_weight + 50.0;
    c.dummy_cost = 10.0 * c.cost_filter_threshold;
    return c;
  }

  void validate() const {
    if (!(epsilon_px > 0.0)) throw ValidationError("assoc.epsilon_px: must be > 0");
    if (!(delta_px > epsilon_px)) throw ValidationError("assoc.delta_px: must be > assoc.epsilon_px");
    if (!(r_weight > 0.0)) throw ValidationError("assoc.r_weight: must be > 0");
    if (!(cost_filter_threshold > 0.0))
      throw ValidationError("assoc.cost_filter_threshold: must be > 0");
    if (!(dummy_cost > cost_filter_threshold))
      throw ValidationError("assoc.dummy_cost: must exceed assoc.cost_filter_threshold");
    if (!(missing_neighbor_penalty >= 0.0) || !(one_sided_missing_penalty >= 0.0))
      throw ValidationError("assoc.missing_neighbor_penalty: must be >= 0");
  }
};

/// The four directional neighbor sets of one node, taken from its own image.
struct NeighborSets {
  std::vector<Keypoint2D> left;
  std::vector<Keypoint2D> right;
  std::vector<Keypoint2D> top;
  std::vector<Keypoint2D> bottom;
};

struct AssignedPair {
  std::size_t u = 0;
  std::size_t v = 0;
  double cost = 0.0;

  friend bool operator==(const AssignedPair&, const AssignedPair&) = default;
};

/// Partial bijection between two keypoint sets.
struct Assignment {
  std::vector<AssignedPair> pairs;
  std::vector<std::size_t> unmatched_u;
  std::vector<std::size_t> unmatched_v;
};

}  // namespace seedslam::assoc
