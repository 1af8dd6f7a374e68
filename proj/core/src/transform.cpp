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

#include "sac/transform.hpp"

#include <algorithm>

namespace sac {
namespace {

Mat3 skew(const Vec3& v) {
  Mat3 k;
  k << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return k;
}

// Rodrigues for unit vectors with a.b >= -0.5, where 1 + c is well away from 0.
Mat3 rodrigues(const Vec3& a, const Vec3& b) {
  const Vec3 v = a.cross(b);
  const double c = a.dot(b);
  const Mat3 k = skew(v);
  return Mat3::Identity() + k + k * k / (1.0 + c);
}

Vec3 flip_axis(const Vec3& a) {
  Vec3 u = Vec3::UnitZ() - Vec3::UnitZ().dot(a) * a;
  if (u.norm() < 1e-12) u = Vec3::UnitX() - Vec3::UnitX().dot(a) * a;
  return u.normalized();
}

}  // namespace

Mat3 align_vectors(const Vec3& from, const Vec3& to) {
  const Vec3 a = from.normalized();
  const Vec3 b = to.normalized();
  if (a.dot(b) >= -0.5) return rodrigues(a, b);
  // Rotate a onto -a by pi about a deterministic orthogonal axis, then close
  // the remaining small angle.
  const Vec3 u = flip_axis(a);
  const Mat3 half_turn = 2.0 * u * u.transpose() - Mat3::Identity();
  return rodrigues(-a, b) * half_turn;
}

Alignment compute_alignment(const Demonstration& demo, const Vec3& start, const Vec3& goal) {
  const Vec3 origin = demo.positions.col(0);
  const Vec3 demo_chord = demo.positions.col(demo.size() - 1) - origin;
  const Vec3 new_chord = goal - start;
  if (demo_chord.norm() <= kChordEpsilon) {
    throw DegenerateChord("demonstration start and end coincide");
  }
  if (new_chord.norm() <= kChordEpsilon) throw DegenerateChord("start and goal coincide");
  Alignment al;
  al.scale = new_chord.norm() / demo_chord.norm();
  al.rotation = align_vectors(demo_chord, new_chord);
  al.start = start;
  al.goal = goal;
  al.origin = origin;
  return al;
}

TransformedDemo transform_demo(const Demonstration& demo, const Alignment& align) {
  TransformedDemo td;
  const Mat3 sr = align.scale * align.rotation;
  td.positions = (sr * (demo.positions.colwise() - align.origin)).colwise() + align.start;
  td.lin_vels = sr * demo.lin_vels;
  td.eulers = demo.eulers;
  td.ang_vels = demo.ang_vels;
  td.wrenches = demo.wrenches;
  td.alignment = align;
  td.index = KdTree(td.positions);
  return td;
}

Eigen::Index nearest_index(const TransformedDemo& td, const Vec3& x) { return td.index.nearest(x); }

Eigen::Index nearest_index_windowed(const TransformedDemo& td, const Vec3& x, Eigen::Index previous,
                                    Eigen::Index window) {
  const Eigen::Index lo = std::max<Eigen::Index>(0, previous - window);
  const Eigen::Index hi = std::min<Eigen::Index>(td.size() - 1, previous + window);
  Eigen::Index best = lo;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = lo; i <= hi; ++i) {
    const double d2 = (td.positions.col(i) - x).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

TrajectoryTracker::TrajectoryTracker(Demonstration demo, const Vec3& start, const Vec3& goal,
                                     std::optional<Eigen::Index> locality_window)
    : demo_(std::move(demo)),
      td_(transform_demo(demo_, compute_alignment(demo_, start, goal))),
      window_(locality_window) {}

bool TrajectoryTracker::retarget(const Vec3& start, const Vec3& goal) {
  const auto& al = td_.alignment;
  if ((start - al.start).norm() <= kRetargetThreshold && (goal - al.goal).norm() <= kRetargetThreshold) {
    return false;
  }
  td_ = transform_demo(demo_, compute_alignment(demo_, start, goal));
  ++revision_;
  return true;
}

Eigen::Index TrajectoryTracker::nearest(const Vec3& x) {
  Eigen::Index i = window_ && previous_ ? nearest_index_windowed(td_, x, *previous_, *window_)
                                        : nearest_index(td_, x);
  previous_ = i;
  return i;
}

}  // namespace sac
