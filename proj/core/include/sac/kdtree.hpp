// Copyright 2026 The sacontrol Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "sac/common.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace sac {

/// Static 3-D kd-tree answering exact nearest-neighbour queries.
///
/// Distances are compared as squared Euclidean norms; ties resolve to the
/// lowest point index, matching a forward linear scan.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(const Eigen::Matrix<double, 3, Eigen::Dynamic>& points);

  Eigen::Index nearest(const Vec3& query) const;
  Eigen::Index size() const { return static_cast<Eigen::Index>(order_.size()); }

 private:
  struct Best {
    double dist2;
    Eigen::Index index;
  };

  void build(std::int32_t lo, std::int32_t hi, int depth);
  void search(std::int32_t lo, std::int32_t hi, int depth, const Vec3& q, Best& best) const;

  static constexpr std::int32_t kLeafSize = 8;

  Eigen::Matrix<double, 3, Eigen::Dynamic> points_;
  std::vector<std::int32_t> order_;
  std::vector<std::uint8_t> axis_;  // split axis per median slot
};

/// Reference semantics for nearest-point lookup: forward linear scan.
Eigen::Index nearest_index_linear(const Eigen::Matrix<double, 3, Eigen::Dynamic>& points,
                                  const Vec3& query);

}  // namespace sac
