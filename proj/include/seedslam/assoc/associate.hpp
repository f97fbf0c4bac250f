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

#include <ostream>
#include <span>

#include "seedslam/assoc/cost.hpp"
#include "seedslam/assoc/hungarian.hpp"
#include "seedslam/assoc/types.hpp"

namespace seedslam::assoc {

/// Matches keypoints of two images: neighbor structure -> relative-geometry costs -> LSAP ->
/// confidence filter. Dummy assignments and pairs costing more than
/// `cost_filter_threshold` are reported as unmatched. Pairs are ordered by `u`.
inline Assignment associate(std::span<const Keypoint2D> us, std::span<const Keypoint2D> vs,
                            const AssocConfig& cfg) {
  Assignment out;
  if (us.empty() || vs.empty()) {
    for (std::size_t i = 0; i < us.size(); ++i) out.unmatched_u.push_back(i);
    for (std::size_t j = 0; j < vs.size(); ++j) out.unmatched_v.push_back(j);
    return out;
  }

  const Eigen::MatrixXd costs = cost_matrix(us, vs, cfg);
  const LsapSolution sol = solve_lsap(costs);

  std::vector<char> v_matched(vs.size(), 0);
  for (std::size_t i = 0; i < us.size(); ++i) {
    const auto j = static_cast<std::size_t>(sol.row_to_col[i]);
    const double c = costs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    if (j < vs.size() && c <= cfg.cost_filter_threshold) {
      out.pairs.push_back({i, j, c});
      v_matched[j] = 1;
    } else {
      out.unmatched_u.push_back(i);
    }
  }
  for (std::size_t j = 0; j < vs.size(); ++j)
    if (!v_matched[j]) out.unmatched_v.push_back(j);
  return out;
}

/// Debug dump: `u_index,v_index,cost` per accepted pair.
inline void write_assignment_csv(std::ostream& out, const Assignment& a) {
  out << "u_index,v_index,cost\n";
  const auto old = out.precision(17);
  for (const auto& p : a.pairs) out << p.u << ',' << p.v << ',' << p.cost << '\n';
  out.precision(old);
}

}  // namespace seedslam::assoc
