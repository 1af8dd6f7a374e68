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

#include "sac/demo.hpp"
#include "sac/kdtree.hpp"

#include <optional>

namespace sac {

/// Chords shorter than this are rejected by compute_alignment (metres).
inline constexpr double kChordEpsilon = 1e-6;

/// Similarity transform mapping the demo chord onto a new start/goal chord.
struct Alignment {
  double scale = 1.0;  // s_L
  Mat3 rotation = Mat3::Identity();
  Vec3 start = Vec3::Zero();
  Vec3 goal = Vec3::Zero();
  Vec3 origin = Vec3::Zero();  // first demo point

  Vec3 apply(const Vec3& demo_point) const { return scale * rotation * (demo_point - origin) + start; }
};

/// Rotation taking unit vector `from` onto unit vector `to` (Rodrigues).
/// Antiparallel inputs rotate by pi about the unit axis orthogonal to `from`
/// with the largest world-z component.
Mat3 align_vectors(const Vec3& from, const Vec3& to);

Alignment compute_alignment(const Demonstration& demo, const Vec3& start, const Vec3& goal);

/// Demonstration re-targeted to a start/goal pair, with a spatial index.
struct TransformedDemo {
  Channel3 positions;
  Channel3 lin_vels;
  Channel3 eulers;
  Channel3 ang_vels;
  Channel6 wrenches;
  Alignment alignment;
  KdTree index;

  Eigen::Index size() const { return positions.cols(); }
};

TransformedDemo transform_demo(const Demonstration& demo, const Alignment& align);

/// argmin_i |x~_i - x|, lowest index on ties.
Eigen::Index nearest_index(const TransformedDemo& td, const Vec3& x);

/// Linear scan restricted to [previous - window, previous + window].
Eigen::Index nearest_index_windowed(const TransformedDemo& td, const Vec3& x, Eigen::Index previous,
                                    Eigen::Index window);

/// Keeps a TransformedDemo in step with moving start/goal points and tracks
/// the previous nearest index for the optional locality window.
class TrajectoryTracker {
 public:
  /// Start/goal moves at or below this distance reuse the current transform.
  static constexpr double kRetargetThreshold = 1e-4;

  TrajectoryTracker(Demonstration demo, const Vec3& start, const Vec3& goal,
                    std::optional<Eigen::Index> locality_window = std::nullopt);

  /// Returns true when the transform was rebuilt.
  bool retarget(const Vec3& start, const Vec3& goal);
  Eigen::Index nearest(const Vec3& x);

  const TransformedDemo& transformed() const { return td_; }
  const Demonstration& demo() const { return demo_; }
  std::uint64_t revision() const { return revision_; }
  void reset_locality() { previous_.reset(); }

 private:
  Demonstration demo_;
  TransformedDemo td_;
  std::optional<Eigen::Index> window_;
  std::optional<Eigen::Index> previous_;
  std::uint64_t revision_ = 0;
};

}  // namespace sac
