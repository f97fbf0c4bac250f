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

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "seedslam/assoc/types.hpp"

namespace seedslam::assoc {

/// Splits `peers` into the four window sets around `node`. Membership in each set is
/// decided independently with strict inequalities, so a peer exactly Delta away is excluded.
inline NeighborSets build_neighbor_sets(const Keypoint2D& node, std::span<const Keypoint2D> peers,
                                        const AssocConfig& cfg) {
  NeighborSets sets;
  const double a = node.x, b = node.y;
  for (const auto& p : peers) {
    const double c = p.x, d = p.y;
    const bool row_band = std::abs(d - b) < cfg.epsilon_px;
    const bool col_band = std::abs(c - a) < cfg.epsilon_px;
    if (row_band && 0.0 < a - c && a - c < cfg.delta_px) sets.left.push_back(p);
    if (row_band && 0.0 < c - a && c - a < cfg.delta_px) sets.right.push_back(p);
    if (col_band && 0.0 < b - d && b - d < cfg.delta_px) sets.top.push_back(p);
    if (col_band && 0.0 < d - b && d - b < cfg.delta_px) sets.bottom.push_back(p);
  }
  return sets;
}

/// Neighbor sets of every point against the rest of its own image.
inline std::vector<NeighborSets> build_all_neighbor_sets(std::span<const Keypoint2D> points,
                                                         const AssocConfig& cfg) {
  std::vector<NeighborSets> out;
  out.reserve(points.size());
  std::vector<Keypoint2D> peers;
  peers.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    peers.clear();
    for (std::size_t j = 0; j < points.size(); ++j)
      if (j != i) peers.push_back(points[j]);
    out.push_back(build_neighbor_sets(points[i], peers, cfg));
  }
  return out;
}

/// Sum of distances from each set's members to the node, in L, R, B, T order.
struct NeighborSummary {
  std::array<double, 4> distance_sum{};
  std::array<std::size_t, 4> count{};
};

inline NeighborSummary summarize(const Keypoint2D& node, const NeighborSets& sets) {
  NeighborSummary s;
  const std::array<const std::vector<Keypoint2D>*, 4> all{&sets.left, &sets.right, &sets.bottom,
                                                          &sets.top};
  for (std::size_t k = 0; k < 4; ++k) {
    for (const auto& p : *all[k]) s.distance_sum[k] += std::hypot(p.x - node.x, p.y - node.y);
    s.count[k] = all[k]->size();
  }
  return s;
}

/// One structural term C'(X, Y) before the r weight.
inline double structure_ratio(double sum_x, std::size_t n_x, double sum_y, std::size_t n_y,
                              const AssocConfig& cfg) {
  if (n_x == 0 && n_y == 0) return cfg.missing_neighbor_penalty;
  if (n_x == 0 || n_y == 0) return cfg.one_sided_missing_penalty;
  const double ratio = sum_x / sum_y;
  return cfg.symmetric_ratio ? std::max(ratio, 1.0 / ratio) : ratio;
}

inline double pair_cost(const Keypoint2D& u, const Keypoint2D& v, const NeighborSummary& su,
                        const NeighborSummary& sv, const AssocConfig& cfg) {
  double cost = std::abs(u.y - v.y);
  for (std::size_t k = 0; k < 4; ++k) {
    cost += cfg.r_weight *
            structure_ratio(su.distance_sum[k], su.count[k], sv.distance_sum[k], sv.count[k], cfg);
  }
  return cost;
}

/// Relative-geometry association cost between a node of image A and a node of image B.
inline double pair_cost(const Keypoint2D& u, const Keypoint2D& v, const NeighborSets& u_sets,
                        const NeighborSets& v_sets, const AssocConfig& cfg) {
  return pair_cost(u, v, summarize(u, u_sets), summarize(v, v_sets), cfg);
}

/// Square cost matrix of side max(|U|, |V|); padded rows/columns carry `dummy_cost`.
inline Eigen::MatrixXd cost_matrix(std::span<const Keypoint2D> us, std::span<const Keypoint2D> vs,
                                   const AssocConfig& cfg) {
  const std::size_t n = std::max(us.size(), vs.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(n, n, cfg.dummy_cost);

  const auto u_sets = build_all_neighbor_sets(us, cfg);
  const auto v_sets = build_all_neighbor_sets(vs, cfg);
  std::vector<NeighborSummary> su(us.size()), sv(vs.size());
  for (std::size_t i = 0; i < us.size(); ++i) su[i] = summarize(us[i], u_sets[i]);
  for (std::size_t j = 0; j < vs.size(); ++j) sv[j] = summarize(vs[j], v_sets[j]);

  for (std::size_t i = 0; i < us.size(); ++i)
    for (std::size_t j = 0; j < vs.size(); ++j) m(i, j) = pair_cost(us[i], vs[j], su[i], sv[j], cfg);
  return m;
}

}  // namespace seedslam::assoc
