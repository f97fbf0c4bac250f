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

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "seedslam/core/errors.hpp"

namespace seedslam::assoc {

struct LsapSolution {
  /// row_to_col[i] is the column assigned to row i.
  std::vector<int> row_to_col;
  double total_cost = 0.0;
};

/// Kuhn-Munkres with row/column potentials (shortest augmenting path form), O(n^3).
///
/// Rows are inserted in index order and, among equal reduced costs, the lowest column
/// index is taken, so the result is a deterministic function of the matrix.
/// `total_cost` is the row-ordered sum of the selected entries.
inline LsapSolution solve_lsap(const Eigen::MatrixXd& costs) {
  if (costs.rows() != costs.cols()) {
    throw ContractViolation("solve_lsap: cost matrix must be square, got " +
                            std::to_string(costs.rows()) + "x" + std::to_string(costs.cols()));
  }
  if (!costs.allFinite()) throw ContractViolation("solve_lsap: cost matrix has non-finite entries");

  const int n = static_cast<int>(costs.rows());
  LsapSolution sol;
  if (n == 0) return sol;

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based internal indexing; column 0 is the virtual source.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);

  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = costs(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  sol.row_to_col.assign(n, -1);
  for (int j = 1; j <= n; ++j) sol.row_to_col[match[j] - 1] = j - 1;
  for (int i = 0; i < n; ++i) sol.total_cost += costs(i, sol.row_to_col[i]);
  return sol;
}

}  // namespace seedslam::assoc
