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

#include <algorithm>
#include <numeric>
#include <random>

#include "seedslam/assoc/hungarian.hpp"

using namespace seedslam;
using assoc::solve_lsap;

namespace {

double brute_force_min(const Eigen::MatrixXd& c) {
  std::vector<int> p(static_cast<std::size_t>(c.rows()));
  std::iota(p.begin(), p.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (int i = 0; i < c.rows(); ++i) s += c(i, p[static_cast<std::size_t>(i)]);
    best = std::min(best, s);
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

bool is_permutation_of_n(const std::vector<int>& p, int n) {
  std::vector<int> s = p;
  std::sort(s.begin(), s.end());
  for (int i = 0; i < n; ++i)
    if (s[static_cast<std::size_t>(i)] != i) return false;
  return static_cast<int>(s.size()) == n;
}

}  // namespace

TEST(Hungarian, TwoByTwoEnumerated) {
  Eigen::MatrixXd c(2, 2);
  c << 4, 1, 2, 3;
  const auto s = solve_lsap(c);
  EXPECT_EQ(s.row_to_col, (std::vector<int>{1, 0}));
  EXPECT_EQ(s.total_cost, 3.0);
}

TEST(Hungarian, EmptyAndSingleton) {
  EXPECT_TRUE(solve_lsap(Eigen::MatrixXd(0, 0)).row_to_col.empty());
  Eigen::MatrixXd one(1, 1);
  one << -2.5;
  const auto s = solve_lsap(one);
  EXPECT_EQ(s.row_to_col, std::vector<int>{0});
  EXPECT_EQ(s.total_cost, -2.5);
}

TEST(Hungarian, MatchesBruteForceOnIntegerMatrices) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> n_dist(1, 7), v_dist(0, 9);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = n_dist(rng);
    Eigen::MatrixXd c(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) c(i, j) = v_dist(rng);
    const auto s = solve_lsap(c);
    ASSERT_TRUE(is_permutation_of_n(s.row_to_col, n));
    EXPECT_EQ(s.total_cost, brute_force_min(c)) << c;
  }
}

TEST(Hungarian, MatchesBruteForceOnRealMatrices) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> v(-50.0, 1000.0);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd c(7, 7);
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 7; ++j) c(i, j) = v(rng);
    EXPECT_EQ(solve_lsap(c).total_cost, brute_force_min(c));
  }
}

TEST(Hungarian, TotalIsSumOfSelectedEntries) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> v(0.0, 1.0);
  Eigen::MatrixXd c(40, 40);
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 40; ++j) c(i, j) = v(rng);
  const auto s = solve_lsap(c);
  ASSERT_TRUE(is_permutation_of_n(s.row_to_col, 40));
  double sum = 0.0;
  for (int i = 0; i < 40; ++i) sum += c(i, s.row_to_col[static_cast<std::size_t>(i)]);
  EXPECT_EQ(s.total_cost, sum);
}

TEST(Hungarian, DeterministicUnderTies) {
  const Eigen::MatrixXd c = Eigen::MatrixXd::Constant(5, 5, 1.0);
  const auto a = solve_lsap(c), b = solve_lsap(c);
  EXPECT_EQ(a.row_to_col, b.row_to_col);
  EXPECT_EQ(a.total_cost, 5.0);
}

TEST(Hungarian, InvariantToRowConstantShift) {
  std::mt19937_64 rng(14);
  std::uniform_int_distribution<int> v(0, 20);
  Eigen::MatrixXd c(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) c(i, j) = v(rng);
  Eigen::MatrixXd shifted = c;
  shifted.row(2).array() += 7.0;
  EXPECT_EQ(solve_lsap(shifted).total_cost, solve_lsap(c).total_cost + 7.0);
}

TEST(Hungarian, RejectsBadInput) {
  EXPECT_THROW(solve_lsap(Eigen::MatrixXd::Zero(2, 3)), ContractViolation);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 2);
  c(0, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(solve_lsap(c), ContractViolation);
  c(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(solve_lsap(c), ContractViolation);
}
