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

#include <filesystem>
#include <string>
#include <vector>

namespace sac {

using Channel3 = Eigen::Matrix<double, 3, Eigen::Dynamic>;
using Channel6 = Eigen::Matrix<double, 6, Eigen::Dynamic>;

/// One recorded execution of a task, sampled at a fixed rate.
///
/// Orientations are XYZ-extrinsic Euler angles. Wrenches are the wrench the
/// end-effector exerts on its surroundings (force first, then torque).
struct Demonstration {
  Channel3 positions;
  Channel3 eulers;
  Channel3 lin_vels;
  Channel3 ang_vels;
  Channel6 wrenches;
  double sample_dt = 0.0;

  Eigen::Index size() const { return positions.cols(); }
  Vec3 position(Eigen::Index i) const { return positions.col(i); }

  /// Throws on broken hard invariants (shared T >= 2, finite, dt > 0).
  void validate() const;

  bool operator==(const Demonstration&) const = default;
};

/// Indices whose step to the next sample is more than 10x what the recorded
/// velocity allows. Informational only.
std::vector<Eigen::Index> implausible_steps(const Demonstration& demo);

struct DemoSet {
  std::vector<Demonstration> demos;
  std::string label;
};

enum class DemoFormat { kCsv, kJson };

DemoFormat format_from_path(const std::filesystem::path& path);

Demonstration load_demonstration(const std::filesystem::path& path, DemoFormat format);
Demonstration load_demonstration(const std::filesystem::path& path);

/// Parses CSV text. Accepts the full 19-column header, the 2-D header
/// `t,px,py,vx,vy`, and `t,px,py` (velocities by central differences).
Demonstration parse_demonstration_csv(const std::string& text);
Demonstration parse_demonstration_json(const std::string& text);

std::string demonstration_to_csv(const Demonstration& demo);
std::string demonstration_to_json(const Demonstration& demo);

void save_demonstration(const Demonstration& demo, const std::filesystem::path& path,
                        DemoFormat format);

/// Loads every demo file (csv/json) of one shape directory, sorted by name.
DemoSet load_demo_set(const std::filesystem::path& dir);

/// Resamples a demonstration to `n` points spaced uniformly in arc length.
/// Falls back to uniform time spacing when the path has zero length.
Demonstration resample_arc_length(const Demonstration& demo, Eigen::Index n);

/// Arc-length resamples every demo to the longest T and averages pointwise.
Demonstration mean_trajectory(const DemoSet& set);

}  // namespace sac
