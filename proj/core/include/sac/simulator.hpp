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

#include "sac/authority.hpp"
#include "sac/controller.hpp"
#include "sac/motion.hpp"
#include "sac/plant.hpp"
#include "sac/transform.hpp"

#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace sac {

/// Unilateral spring-damper half-space. The free side is where
/// (position - point) . normal > 0.
struct Wall {
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  double stiffness = 10000.0;  // N/m
  double damping = 50.0;       // N s/m
  double friction = 0.0;       // N s/m, viscous, tangential, while in contact
};

struct Button {
  std::size_t wall = 0;
  double trigger_force = 15.0;  // N
  double sustain = 0.005;       // s above trigger before latching
  bool latched = false;
  double time_above = 0.0;
};

struct Environment {
  std::vector<Wall> walls;
  std::optional<Button> button;

  void validate() const;
};

/// Normal contact force of one wall (>= 0, non-adhesive).
double wall_normal_force(const Vec6& pose, const Vec6& vel, const Wall& wall);

/// Summed contact wrench on the robot (normal force plus tangential
/// friction while penetrating); torques are zero.
Vec6 environment_wrench(const Vec6& pose, const Vec6& vel, const Environment& env);

/// Advances the button latch with the current contact state.
void update_button(Environment& env, const Vec6& pose, const Vec6& vel, double dt);

enum class ForceFrame { kTool, kBody };

/// Human wrenches acting on the robot: tool side of the wrist sensor (seen
/// by it) and flange/body side (seen only by the joint-torque estimate).
struct HumanInput {
  Vec6 tool_wrench = Vec6::Zero();
  Vec6 body_wrench = Vec6::Zero();

  bool operator==(const HumanInput&) const = default;
};

struct SensorReadings {
  Vec6 w_s;    // wrist sensor
  Vec6 w_est;  // joint-torque estimate
  Vec6 w_env;  // true external wrench entering the plant
};

/// Readings are wrenches acting on the robot. Gaussian noise is drawn from
/// `rng` (6 draws for w_s, then 6 for w_est) only when the sigma is > 0.
SensorReadings sensor_models(const Vec6& w_contact, const HumanInput& human, double noise_sigma,
                             double noise_sigma_est, std::mt19937_64& rng);

/// Wrench the end-effector exerts on its surroundings, given a reading of the
/// wrench acting on it.
inline Vec6 interaction_wrench(const Vec6& reading) { return -reading; }

/// Piecewise-constant scripted human wrench, active on [start, end).
struct HumanSegment {
  double start = 0.0;
  double end = 0.0;
  ForceFrame frame = ForceFrame::kBody;
  Vec6 wrench = Vec6::Zero();
};

HumanInput scripted_input(const std::vector<HumanSegment>& timeline, double t);

struct DemoSource {
  std::filesystem::path path;  // file, or directory of demos
  bool use_mean = true;        // directory: mean trajectory vs. single demo
  std::size_t index = 0;       // directory + !use_mean: which demo
  std::optional<Eigen::Index> locality_window;
};

struct SimParams {
  double dt = 1e-3;
  double duration = 10.0;
  std::uint64_t seed = 1;
  double noise_sigma = 0.0;
  double noise_sigma_est = 0.0;
  double reference_follow_gain = 20.0;  // 1/s, scaled by alpha_h
  double authority_sensor_lag = 0.0;    // s, first-order filter on sensed wrenches; 0 = off
  Vec6 initial_pose = Vec6::Zero();
  Vec6 initial_vel = Vec6::Zero();
  bool start_at_demo_start = true;  // initial position = transformed demo start
  bool controller_enabled = true;   // false: w_cmd = g_x, tank frozen
};

struct ScenarioConfig {
  std::string name = "scenario";
  DemoSource demo;
  std::optional<Vec3> start;
  std::optional<Vec3> goal;
  std::vector<ObstacleSphere> obstacles;
  MotionParams motion;
  AuthorityParams authority;
  ControllerGains gains;
  TankParams tank;
  PlantModel plant;
  Environment environment;
  SimParams sim;
  std::vector<HumanSegment> human;

  /// Resolved demonstration; filled by load_scenario or set directly.
  std::optional<Demonstration> demo_data;

  void validate() const;
  Eigen::Index steps() const;
};

/// Parses a scenario JSON document. Relative demo paths resolve against
/// `base_dir`. Missing keys keep their defaults.
ScenarioConfig parse_scenario(const std::string& json_text, const std::filesystem::path& base_dir = {});
ScenarioConfig load_scenario(const std::filesystem::path& path);
/// Loads the demonstration named by cfg.demo into cfg.demo_data.
void resolve_demo(ScenarioConfig& cfg);

/// One row of the simulation trace.
struct TraceRecord {
  double time = 0.0;
  Vec6 pose = Vec6::Zero();
  Vec6 vel = Vec6::Zero();
  Vec6 pose_ref = Vec6::Zero();
  Vec3 x_dot_ref = Vec3::Zero();
  Vec3 theta_dot_ref = Vec3::Zero();
  Vec6 w_ref = Vec6::Zero();
  Vec6 w_s = Vec6::Zero();
  Vec6 w_est = Vec6::Zero();
  Vec6 w_env = Vec6::Zero();
  Vec6 w_contact = Vec6::Zero();
  Vec6 u = Vec6::Zero();
  double alpha_h = 0.0;
  double beta = 0.0;
  double psi = 0.0;
  bool gamma = true;
  bool zeta = true;
  bool phi = false;
  Eigen::Index i_min = 0;
  bool guidance = false;
  bool button_latched = false;
  double passivity_residual = 0.0;

  bool operator==(const TraceRecord&) const = default;
};

struct TraceMeta {
  std::string scenario;
  double dt = 0.0;
  Vec3 goal = Vec3::Zero();
  std::vector<ObstacleSphere> obstacles;
  TankParams tank;
};

struct SimTrace {
  TraceMeta meta;
  std::vector<TraceRecord> records;
};

/// Ordered, non-blocking hand-off of live human input into the loop.
class InputQueue {
 public:
  void push(HumanInput in);
  /// Most recent value pushed since the last drain, if any.
  std::optional<HumanInput> drain();

 private:
  std::mutex mu_;
  std::deque<HumanInput> items_;
};

/// Stateful closed loop. Per step: sensors -> authority -> motion generator
/// -> tank flags -> auxiliary input -> control wrench -> tank step -> plant.
class Simulation {
 public:
  explicit Simulation(ScenarioConfig cfg);

  /// Advances one dt. `live` replaces the scripted human input when set.
  const TraceRecord& step(const std::optional<HumanInput>& live = std::nullopt);

  double time() const { return time_; }
  Eigen::Index step_count() const { return steps_; }
  bool finished() const { return steps_ >= cfg_.steps(); }
  const TraceRecord& last() const { return last_; }
  const ScenarioConfig& config() const { return cfg_; }
  const TransformedDemo& transformed() const { return tracker_.transformed(); }
  std::uint64_t transform_revision() const { return tracker_.revision(); }
  const PlantState& plant_state() const { return plant_; }
  const ControllerState& controller_state() const { return ctrl_; }
  const Environment& environment() const { return env_; }
  const std::vector<ObstacleSphere>& obstacles() const { return obstacles_; }
  TraceMeta meta() const;

  // Live edits; they apply from the next step.
  void set_goal(const Vec3& goal);
  std::size_t add_obstacle(const ObstacleSphere& obs);
  bool remove_obstacle(std::size_t index);

  /// Keys that may change while running.
  static const std::vector<std::string>& live_parameters();
  /// Returns the applied value; throws ConfigError for keys not in
  /// live_parameters() or out-of-range values.
  double set_parameter(const std::string& key, double value);

 private:
  ScenarioConfig cfg_;
  TrajectoryTracker tracker_;
  std::vector<ObstacleSphere> obstacles_;
  Environment env_;
  PlantState plant_;
  ControllerState ctrl_;
  AuthorityState authority_;
  std::mt19937_64 rng_;
  Vec6 pose_ref_;
  Vec6 vel_ref_;
  Vec6 w_ref_prev_ = Vec6::Zero();
  Vec6 lag_w_s_ = Vec6::Zero();
  Vec6 lag_w_est_ = Vec6::Zero();
  double time_ = 0.0;
  Eigen::Index steps_ = 0;
  TraceRecord last_;
};

/// Runs a scenario to completion. When `live_input` is given it is drained
/// once per step and the latest value held; otherwise the scripted timeline
/// drives the human input.
SimTrace run_scenario(const ScenarioConfig& cfg, InputQueue* live_input = nullptr);

}  // namespace sac
