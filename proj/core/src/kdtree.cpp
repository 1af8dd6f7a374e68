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

#include "sac/kdtree.hpp"

#include <algorithm>
#include <numeric>

namespace sac {

KdTree::KdTree(const Eigen::Matrix<double, 3, Eigen::Dynamic>& points)
    : points_(points), order_(static_cast<size_t>(points.cols())), axis_(static_cast<size_t>(points.cols()), 0) {
  std::iota(order_.begin(), order_.end(), 0);
  build(0, static_cast<std::int32_t>(order_.size()), 0);
}

void KdTree::build(std::int32_t lo, std::int32_t hi, int depth) {
  if (hi - lo <= kLeafSize) return;
  // Split on the axis of largest spread; keeps degenerate (planar) inputs balanced.
  Vec3 mn = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 mx = -mn;
  for (std::int32_t i = lo; i < hi; ++i) {
    mn = mn.cwiseMin(points_.col(order_[static_cast<size_t>(i)]));
    mx = mx.cwiseMax(points_.col(order_[static_cast<size_t>(i)]));
  }
  Eigen::Index axis = 0;
  (mx - mn).maxCoeff(&axis);
  const std::int32_t mid = lo + (hi - lo) / 2;
  std::nth_element(order_.begin() + lo, order_.begin() + mid, order_.begin() + hi,
                   [&](std::int32_t a, std::int32_t b) { return points_(axis, a) < points_(axis, b); });
  axis_[static_cast<size_t>(mid)] = static_cast<std::uint8_t>(axis);
  build(lo, mid, depth + 1);
  build(mid + 1, hi, depth + 1);
}

void KdTree::search(std::int32_t lo, std::int32_t hi, int depth, const Vec3& q, Best& best) const {
  auto consider = [&](std::int32_t slot) {
    const std::int32_t idx = order_[static_cast<size_t>(slot)];
    const double d2 = (points_.col(idx) - q).squaredNorm();
    if (d2 < best.dist2 || (d2 == best.dist2 && idx < best.index)) best = {d2, idx};
  };
  if (hi - lo <= kLeafSize) {
    for (std::int32_t i = lo; i < hi; ++i) consider(i);
    return;
  }
  const std::int32_t mid = lo + (hi - lo) / 2;
  const int axis = axis_[static_cast<size_t>(mid)];
  const double diff = q[axis] - points_(axis, order_[static_cast<size_t>(mid)]);
  consider(mid);
  // Points equal to the split value can sit on either side of the median.
  if (diff <= 0.0) {
    search(lo, mid, depth + 1, q, best);
    if (diff * diff <= best.dist2) search(mid + 1, hi, depth + 1, q, best);
  } else {
    search(mid + 1, hi, depth + 1, q, best);
    if (diff * diff <= best.dist2) search(lo, mid, depth + 1, q, best);
  }
}

Eigen::Index KdTree::nearest(const Vec3& query) const {
  if (order_.empty()) return -1;
  Best best{std::numeric_limits<double>::infinity(), std::numeric_limits<Eigen::Index>::max()};
  search(0, static_cast<std::int32_t>(order_.size()), 0, query, best);
  return best.index;
}

Eigen::Index nearest_index_linear(const Eigen::Matrix<double, 3, Eigen::Dynamic>& points,
                                  const Vec3& query) {
  Eigen::Index best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    const double d2 = (points.col(i) - query).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

}  // namespace sac
