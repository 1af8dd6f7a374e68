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

#include "sac/simulator.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace sac {

struct BenchParams {
  std::filesystem::path dataset_dir;
  std::string shape = "Leaf_1";
  std::size_t n_starts = 20;
  double perturbation = 0.2;  // fraction of the bounding-box diagonal
  double scale = 10.0;        // dataset units -> desk metres
  Vec3 goal = Vec3(0.5, 0.0, 0.3);
  double duration = 12.0;  // s
  double dt = 1e-3;        // s
  std::uint64_t seed = 1;
  unsigned workers = 0;  // 0 = hardware concurrency
  std::size_t grid = 40;  // streamline grid points per axis
  double contact_fraction = 0.02;  // "reached the trajectory" radius / diagonal
  double goal_tolerance = 0.005;   // m
  MotionParams motion;
};

struct BenchRun {
  std::size_t index = 0;
  Vec3 start = Vec3::Zero();
  bool goal_reached = false;
  double final_error = 0.0;  // m
  /// Mean distance to the demo polyline after first contact; NaN if the
  /// run never came within the contact radius.
  double mean_deviation = 0.0;
  std::ptrdiff_t contact_step = -1;
  std::size_t steps = 0;  // steps until within goal_tolerance (all steps if never)
  std::vector<Vec3> path;  // decimated positions
};

struct StreamSample {
  Vec3 position;
  Vec3 velocity;
};

struct BenchResult {
  double diagonal = 0.0;  // m, of the desk-scaled demo
  Channel3 reference;     // desk-scaled demo positions
  std::vector<BenchRun> runs;
  std::vector<StreamSample> streamlines;
};

/// Distance from x to the polyline through the columns of `pts`.
double distance_to_polyline(const Channel3& pts, const Vec3& x);

/// Builds the closed-loop scenario bench uses for one start.
ScenarioConfig bench_scenario(const BenchParams& p, const Demonstration& mean, const Vec3& start);

/// Runs every start (in parallel workers) and samples the field on a grid.
/// Throws MissingDataset when the shape directory is absent.
BenchResult run_bench(const BenchParams& p);

/// Writes metrics.csv, paths.csv and streamlines.csv into `out_dir`.
void write_bench(const BenchResult& r, const std::filesystem::path& out_dir);

}  // namespace sac
