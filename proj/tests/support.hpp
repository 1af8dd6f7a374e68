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
#include "sac/simulator.hpp"

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace sac::testing {

inline std::filesystem::path source_dir() { return SAC_SOURCE_DIR; }
inline std::filesystem::path scenario_dir() { return source_dir() / "scenarios"; }
inline std::filesystem::path lasa_dir() { return source_dir() / "data" / "lasa"; }

inline std::vector<std::filesystem::path> shipped_scenarios() {
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(scenario_dir())) {
    if (entry.path().extension() == ".json") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Random-walk demonstration with `n` samples, nonzero chord.
inline Demonstration random_demo(std::mt19937_64& rng, Eigen::Index n, double dt = 0.01) {
  std::normal_distribution<double> step(0.0, 0.01);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Demonstration d;
  d.sample_dt = dt;
  d.positions.resize(3, n);
  d.eulers.resize(3, n);
  d.lin_vels.resize(3, n);
  d.ang_vels.resize(3, n);
  d.wrenches.resize(6, n);
  const Vec3 drift = Vec3(u(rng), u(rng), u(rng)).normalized() * 0.5 / static_cast<double>(n);
  Vec3 p(u(rng), u(rng), u(rng));
  Vec3 th = 0.3 * Vec3(u(rng), u(rng), u(rng));
  for (Eigen::Index i = 0; i < n; ++i) {
    d.positions.col(i) = p;
    d.eulers.col(i) = th;
    for (int k = 0; k < 6; ++k) d.wrenches(k, i) = 5.0 * u(rng);
    p += drift + Vec3(step(rng), step(rng), step(rng));
    th += Vec3(step(rng), step(rng), step(rng));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index j = std::min(i + 1, n - 1);
    const Eigen::Index k = j == i ? i - 1 : i;
    d.lin_vels.col(i) = (d.positions.col(j) - d.positions.col(k)) / dt;
    d.ang_vels.col(i) = (d.eulers.col(j) - d.eulers.col(k)) / dt;
  }
  return d;
}

}  // namespace sac::testing
