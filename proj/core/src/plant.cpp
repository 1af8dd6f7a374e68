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

#include "sac/plant.hpp"

namespace sac {

void PlantModel::validate() const {
  if (!(inertia.diagonal().array() > 0.0).all()) throw ConfigError("plant.inertia must be positive definite");
  if (!coriolis.allFinite() || !gravity.allFinite()) throw ConfigError("plant matrices must be finite");
}

PlantState plant_step(const PlantState& s, const Vec6& w_cmd, const Vec6& w_env, const PlantModel& plant,
                      double dt) {
  const Vec6 acc = plant.inertia.inverse() * (w_cmd + w_env - plant.coriolis * s.vel - plant.gravity);
  PlantState next;
  next.vel = s.vel + acc * dt;
  next.pose = wrap_pose(s.pose + 0.5 * (s.vel + next.vel) * dt);
  return next;
}

}  // namespace sac
