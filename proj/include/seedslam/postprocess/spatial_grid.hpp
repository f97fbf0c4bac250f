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
#include <cstdint>
#include <limits>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "seedslam/core/types.hpp"

namespace seedslam::postprocess {

/// Uniform hash grid over 3D points for radius and k-nearest queries. Exact: every query
/// visits all cells that can hold a closer point.
class SpatialGrid {
 public:
  explicit SpatialGrid(double cell_size) : cell_(cell_size) {}

  void insert(const Vec3& p, std::size_t index) {
    cells_[key(cell_of(p))].push_back({p, index});
    if (count_ == 0) {
      lo_ = hi_ = cell_of(p);
    } else {
      const auto c = cell_of(p);
      for (int a = 0; a < 3; ++a) {
        lo_[a] = std::min(lo_[a], c[a]);
        hi_[a] = std::max(hi_[a], c[a]);
      }
    }
    ++count_;
  }

  std::size_t size() const { return count_; }

  bool any_within(const Vec3& p, double radius) const {
    const auto c = cell_of(p);
    const int reach = static_cast<int>(std::ceil(radius / cell_));
    const double r2 = radius * radius;
    for (int dx = -reach; dx <= reach; ++dx)
      for (int dy = -reach; dy <= reach; ++dy)
        for (int dz = -reach; dz <= reach; ++dz) {
          auto it = cells_.find(key({c[0] + dx, c[1] + dy, c[2] + dz}));
          if (it == cells_.end()) continue;
          for (const auto& e : it->second)
            if ((e.point - p).squaredNorm() < r2) return true;
        }
    return false;
  }

  /// Distances to the k nearest stored points other than `exclude`, ascending.
  std::vector<double> knn_distances(const Vec3& p, std::size_t k,
                                    std::size_t exclude = std::numeric_limits<std::size_t>::max()) const {
    std::vector<double> best;
    if (k == 0 || count_ == 0) return best;
    const auto c = cell_of(p);
    int max_ring = 0;
    for (int a = 0; a < 3; ++a) max_ring = std::max({max_ring, std::abs(c[a] - lo_[a]), std::abs(hi_[a] - c[a])});

    for (int ring = 0; ring <= max_ring; ++ring) {
      for (int dx = -ring; dx <= ring; ++dx)
        for (int dy = -ring; dy <= ring; ++dy)
          for (int dz = -ring; dz <= ring; ++dz) {
            if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != ring) continue;
            auto it = cells_.find(key({c[0] + dx, c[1] + dy, c[2] + dz}));
            if (it == cells_.end()) continue;
            for (const auto& e : it->second) {
              if (e.index == exclude) continue;
              best.push_back((e.point - p).norm());
            }
          }
      if (best.size() >= k) {
        std::partial_sort(best.begin(), best.begin() + static_cast<std::ptrdiff_t>(k), best.end());
        best.resize(k);
        // Anything outside the searched cube is at least `ring * cell_` away.
        if (best.back() <= ring * cell_) return best;
      }
    }
    std::sort(best.begin(), best.end());
    if (best.size() > k) best.resize(k);
    return best;
  }

 private:
  struct Entry {
    Vec3 point;
    std::size_t index;
  };
  using Cell = std::array<int, 3>;

  Cell cell_of(const Vec3& p) const {
    return {static_cast<int>(std::floor(p.x() / cell_)), static_cast<int>(std::floor(p.y() / cell_)),
            static_cast<int>(std::floor(p.z() / cell_))};
  }

  static std::uint64_t key(const Cell& c) {
    const auto u = [](int v) { return static_cast<std::uint64_t>(static_cast<std::uint32_t>(v) & 0x1FFFFF); };
    return (u(c[0]) << 42) | (u(c[1]) << 21) | u(c[2]);
  }

  double cell_;
  std::unordered_map<std::uint64_t, std::vector<Entry>> cells_;
  Cell lo_{}, hi_{};
  std::size_t count_ = 0;
};

}  // namespace seedslam::postprocess
