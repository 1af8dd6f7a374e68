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

namespace sac {

/// Task-space rigid-body plant: M xi'' + C xi' + g = w + w_env.
struct PlantModel {
  Diag6 inertia = Diag6(Vec6((Vec6() << 2.0, 2.0, 2.0, 0.05, 0.05, 0.05).finished()));
  Mat6 coriolis = Mat6::Zero();
  Vec6 gravity = Vec6::Zero();

  void validate() const;
};

struct PlantState {
  Vec6 pose = Vec6::Zero();  // position (m), XYZ Euler angles (rad)
  Vec6 vel = Vec6::Zero();
};

/// One step under a wrench held constant over the step (zero-order hold).
///
/// acc = M^-1 (w_cmd + w_env - C vel - g); vel' = vel + acc dt;
/// pose' = pose + (vel + vel')/2 dt, i.e. the exact solution for constant
/// acceleration. Angles are wrapped to (-pi, pi].
PlantState plant_step(const PlantState& s, const Vec6& w_cmd, const Vec6& w_env, const PlantModel& plant,
                      double dt);

}  // namespace sac
