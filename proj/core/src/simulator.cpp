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

#include "sac/simulator.hpp"

#include <algorithm>
#include <cmath>

namespace sac {

void Environment::validate() const {
  for (const auto& w : walls) {
    if (!(w.stiffness >= 0.0 && w.damping >= 0.0 && w.friction >= 0.0)) {
      throw ConfigError("wall stiffness/damping/friction must be >= 0");
    }
    if (std::abs(w.normal.norm() - 1.0) > 1e-9) throw ConfigError("wall normal must be a unit vector");
  }
  if (button) {
    if (button->wall >= walls.size()) throw ConfigError("button refers to a missing wall");
    if (!(button->trigger_force > 0.0)) throw ConfigError("button trigger_force must be positive");
  }
}

double wall_normal_force(const Vec6& pose, const Vec6& vel, const Wall& wall) {
  const Vec3 p = pose.head<3>();
  const double depth = (wall.point - p).dot(wall.normal);
  if (depth <= 0.0) return 0.0;
  const double f = wall.stiffness * depth - wall.damping * vel.head<3>().dot(wall.normal);
  return std::max(f, 0.0);
}

Vec6 environment_wrench(const Vec6& pose, const Vec6& vel, const Environment& env) {
  Vec6 w = Vec6::Zero();
  for (const auto& wall : env.walls) {
    w.head<3>() += wall_normal_force(pose, vel, wall) * wall.normal;
    if (wall.friction > 0.0 && (wall.point - pose.head<3>()).dot(wall.normal) > 0.0) {
      const Vec3 v = vel.head<3>();
      w.head<3>() -= wall.friction * (v - v.dot(wall.normal) * wall.normal);
    }
  }
  return w;
}

void update_button(Environment& env, const Vec6& pose, const Vec6& vel, double dt) {
  if (!env.button || env.button->latched) return;
  auto& b = *env.button;
  if (wall_normal_force(pose, vel, env.walls[b.wall]) >= b.trigger_force) {
    b.time_above += dt;
    if (b.time_above >= b.sustain - 1e-12) b.latched = true;
  } else {
    b.time_above = 0.0;
  }
}

SensorReadings sensor_models(const Vec6& w_contact, const HumanInput& human, double noise_sigma,
                             double noise_sigma_est, std::mt19937_64& rng) {
  SensorReadings r;
  r.w_env = w_contact + human.tool_wrench + human.body_wrench;
  r.w_s = w_contact + human.tool_wrench;
  r.w_est = r.w_env;
  if (noise_sigma > 0.0) {
    std::normal_distribution<double> n(0.0, noise_sigma);
    for (int i = 0; i < 6; ++i) r.w_s[i] += n(rng);
  }
  if (noise_sigma_est > 0.0) {
    std::normal_distribution<double> n(0.0, noise_sigma_est);
    for (int i = 0; i < 6; ++i) r.w_est[i] += n(rng);
  }
  return r;
}

HumanInput scripted_input(const std::vector<HumanSegment>& timeline, double t) {
  HumanInput in;
  for (const auto& seg : timeline) {
    if (t >= seg.start && t < seg.end) {
      (seg.frame == ForceFrame::kTool ? in.tool_wrench : in.body_wrench) += seg.wrench;
    }
  }
  return in;
}

void InputQueue::push(HumanInput in) {
  std::lock_guard lock(mu_);
  items_.push_back(std::move(in));
}

std::optional<HumanInput> InputQueue::drain() {
  std::lock_guard lock(mu_);
  if (items_.empty()) return std::nullopt;
  HumanInput latest = items_.back();
  items_.clear();
  return latest;
}

Eigen::Index ScenarioConfig::steps() const {
  return static_cast<Eigen::Index>(std::llround(sim.duration / sim.dt));
}

void ScenarioConfig::validate() const {
  if (!(sim.dt >= 1e-4 && sim.dt <= 1e-2)) throw ConfigError("sim.dt must lie in [1e-4, 1e-2] s");
  if (!(sim.duration > 0.0)) throw ConfigError("sim.duration must be positive");
  if (sim.noise_sigma < 0.0 || sim.noise_sigma_est < 0.0) throw ConfigError("noise sigma must be >= 0");
  if (sim.authority_sensor_lag < 0.0) throw ConfigError("sim.authority_sensor_lag must be >= 0");
  if (sim.reference_follow_gain < 0.0) throw ConfigError("sim.reference_follow_gain must be >= 0");
  motion.validate();
  authority.validate();
  gains.validate();
  tank.validate();
  plant.validate();
  environment.validate();
  for (const auto& o : obstacles) o.validate();
  for (const auto& h : human) {
    if (!(h.end >= h.start)) throw ConfigError("human segment ends before it starts");
    if (!h.wrench.allFinite()) throw ConfigError("human segment wrench must be finite");
  }
}

namespace {

const Demonstration& demo_of(ScenarioConfig& cfg) {
  cfg.validate();
  if (!cfg.demo_data) resolve_demo(cfg);
  return *cfg.demo_data;
}

TrajectoryTracker make_tracker(ScenarioConfig& cfg) {
  const Demonstration& d = demo_of(cfg);
  const Vec3 start = cfg.start.value_or(Vec3(d.positions.col(0)));
  const Vec3 goal = cfg.goal.value_or(Vec3(d.positions.col(d.size() - 1)));
  return TrajectoryTracker(d, start, goal, cfg.demo.locality_window);
}

}  // namespace

Simulation::Simulation(ScenarioConfig cfg)
    : cfg_(std::move(cfg)),
      tracker_(make_tracker(cfg_)),
      obstacles_(cfg_.obstacles),
      env_(cfg_.environment),
      rng_(cfg_.sim.seed) {
  plant_.pose = cfg_.sim.initial_pose;
  plant_.vel = cfg_.sim.initial_vel;
  if (cfg_.sim.start_at_demo_start) {
    plant_.pose.head<3>() = tracker_.transformed().positions.col(0);
    plant_.pose.tail<3>() = tracker_.transformed().eulers.col(0);
  }
  plant_.pose = wrap_pose(plant_.pose);
  pose_ref_ = plant_.pose;
  vel_ref_ = plant_.vel;
  ctrl_.tank = EnergyTank::full(cfg_.tank);
  ctrl_.flags = tank_flags(ctrl_.tank, Vec6::Zero(), Vec6::Zero());
  last_.pose = plant_.pose;
  last_.vel = plant_.vel;
  last_.pose_ref = pose_ref_;
  last_.psi = ctrl_.tank.energy();
}

TraceMeta Simulation::meta() const {
  return {cfg_.name, cfg_.sim.dt, tracker_.transformed().alignment.goal, obstacles_, cfg_.tank};
}

const TraceRecord& Simulation::step(const std::optional<HumanInput>& live) {
  const double h = cfg_.sim.dt;
  const HumanInput human = live ? *live : scripted_input(cfg_.human, time_);

  // Sensors.
  const Vec6 w_contact = environment_wrench(plant_.pose, plant_.vel, env_);
  update_button(env_, plant_.pose, plant_.vel, h);
  const SensorReadings rd = sensor_models(w_contact, human, cfg_.sim.noise_sigma, cfg_.sim.noise_sigma_est, rng_);
  const Vec6 w_int = interaction_wrench(rd.w_s);

  // Authority.
  Vec6 ws_auth = w_int;
  Vec6 west_auth = interaction_wrench(rd.w_est);
  if (cfg_.sim.authority_sensor_lag > 0.0) {
    const double k = h / (cfg_.sim.authority_sensor_lag + h);
    lag_w_s_ += k * (ws_auth - lag_w_s_);
    lag_w_est_ += k * (west_auth - lag_w_est_);
    ws_auth = lag_w_s_;
    west_auth = lag_w_est_;
  }
  const double w_diff = wrench_difference(ws_auth, west_auth, w_ref_prev_, cfg_.authority);
  authority_ = update_authority(authority_, raw_authority(w_diff, cfg_.authority), cfg_.authority);
  authority_.last_w_diff = w_diff;
  const double alpha = authority_.alpha_h;

  // Motion generator.
  const Vec3 x = plant_.pose.head<3>();
  const Vec3 theta = plant_.pose.tail<3>();
  const Eigen::Index i_min = tracker_.nearest(x);
  const ReferenceOutput ref = generate_at(i_min, x, theta, tracker_.transformed(), obstacles_, alpha, cfg_.motion);

  const Vec6 e = pose_diff(plant_.pose, pose_ref_);
  const Vec6 e_dot = plant_.vel - vel_ref_;
  Vec6 vel_ref_next;
  vel_ref_next << ref.x_dot_ref, ref.theta_dot_ref;
  vel_ref_next += alpha * cfg_.sim.reference_follow_gain * e;
  const Vec6 acc_ref = (vel_ref_next - vel_ref_) / h;

  // gamma and zeta from the pre-step energy. phi is decided at the step
  // midpoint velocity, where the reference wrench does its work.
  TankFlags flags = tank_flags(ctrl_.tank, e_dot, ref.w_ref);
  const Vec6 w_err =
      force_error(ref.w_ref, w_int, tracker_.transformed().wrenches.col(i_min), cfg_.gains.force_axes);

  // Error dynamics over the step are linear and diagonal in (e, edot):
  //   M a = open - K_tot (e + h edot/2 + h^2 a/4) - D_tot (edot + h a/2)
  // Solving for a gives the midpoint state the control law is evaluated at.
  const Impedance imp = variable_impedance(alpha, cfg_.gains.k_max);
  const double z = flags.zeta ? 1.0 : 0.0;
  const Vec6 k_tot = cfg_.gains.k_bar.diagonal() + z * imp.stiffness.diagonal();
  const Vec6 d_tot = cfg_.gains.d_bar.diagonal() + z * imp.damping.diagonal();
  Vec6 open = rd.w_env - cfg_.plant.coriolis * e_dot;
  if (flags.zeta) open += cfg_.gains.k_w * w_err + cfg_.gains.k_i * ctrl_.wrench_error_integral;
  const Vec6 m = cfg_.plant.inertia.diagonal();
  auto midpoint_acc = [&](const Vec6& total) -> Vec6 {
    return (total.array() - k_tot.array() * (e + 0.5 * h * e_dot).array() - d_tot.array() * e_dot.array()) /
           (m.array() + k_tot.array() * (0.25 * h * h) + d_tot.array() * (0.5 * h));
  };
  // With zeta = 1 the reference wrench enters either way; with zeta = 0 only
  // through phi.
  Vec6 a = midpoint_acc(open + ref.w_ref);
  flags.phi = (e_dot + 0.5 * h * a).dot(ref.w_ref) < 0.0;
  if (!flags.zeta && !flags.phi) a = midpoint_acc(open);
  ctrl_.flags = flags;
  const Vec6 e_dot_mid = e_dot + 0.5 * h * a;
  const Vec6 e_mid = e + 0.5 * h * e_dot + 0.25 * h * h * a;

  const bool on = cfg_.sim.controller_enabled;
  const Vec6 u = on ? auxiliary_input(e_mid, e_dot_mid, w_err, ref.w_ref, alpha, ctrl_, cfg_.gains) : Vec6::Zero();
  const Vec6 w_cmd = on ? control_wrench_from_error(e_mid, e_dot_mid, vel_ref_, acc_ref, cfg_.plant, u, cfg_.gains)
                        : cfg_.plant.gravity;

  const double v_prev = storage(e, e_dot, ctrl_.tank.s, cfg_.plant, cfg_.gains);
  if (on) ctrl_ = tank_step(ctrl_, e_mid, e_dot_mid, w_err, ref.w_ref, alpha, cfg_.gains, h);
  plant_ = plant_step(plant_, w_cmd, rd.w_env, cfg_.plant, h);
  pose_ref_ = wrap_pose(pose_ref_ + 0.5 * h * (vel_ref_ + vel_ref_next));
  vel_ref_ = vel_ref_next;

  const double v_now = storage(pose_diff(plant_.pose, pose_ref_), plant_.vel - vel_ref_, ctrl_.tank.s,
                               cfg_.plant, cfg_.gains);
  ctrl_.last_passivity_residual = passivity_residual(v_prev, v_now, e_dot_mid, rd.w_env, h);
  w_ref_prev_ = ref.w_ref;

  ++steps_;
  time_ = static_cast<double>(steps_) * h;

  TraceRecord& r = last_;
  r.time = time_;
  r.pose = plant_.pose;
  r.vel = plant_.vel;
  r.pose_ref = pose_ref_;
  r.x_dot_ref = ref.x_dot_ref;
  r.theta_dot_ref = ref.theta_dot_ref;
  r.w_ref = ref.w_ref;
  r.w_s = rd.w_s;
  r.w_est = rd.w_est;
  r.w_env = rd.w_env;
  r.w_contact = w_contact;
  r.u = u;
  r.alpha_h = alpha;
  r.beta = ref.beta;
  r.psi = ctrl_.tank.energy();
  r.gamma = flags.gamma;
  r.zeta = flags.zeta;
  r.phi = flags.phi;
  r.i_min = i_min;
  r.guidance = ref.guidance_active;
  r.button_latched = env_.button && env_.button->latched;
  r.passivity_residual = ctrl_.last_passivity_residual;
  return r;
}

void Simulation::set_goal(const Vec3& goal) {
  tracker_.retarget(tracker_.transformed().alignment.start, goal);
}

std::size_t Simulation::add_obstacle(const ObstacleSphere& obs) {
  obs.validate();
  obstacles_.push_back(obs);
  return obstacles_.size() - 1;
}

bool Simulation::remove_obstacle(std::size_t index) {
  if (index >= obstacles_.size()) return false;
  obstacles_.erase(obstacles_.begin() + static_cast<std::ptrdiff_t>(index));
  return true;
}

const std::vector<std::string>& Simulation::live_parameters() {
  static const std::vector<std::string> keys = {
      "motion.v_th",   "motion.w_th",  "motion.obstacle_gain", "authority.a",       "authority.b",
      "authority.c1",  "authority.c2", "authority.g_plus",     "authority.g_minus", "sim.noise_sigma",
      "sim.noise_sigma_est"};
  return keys;
}

double Simulation::set_parameter(const std::string& key, double value) {
  const auto& keys = live_parameters();
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError("UnknownKey " + key);
  ScenarioConfig next = cfg_;
  if (key == "motion.v_th") next.motion.v_th = value;
  else if (key == "motion.w_th") next.motion.w_th = value;
  else if (key == "motion.obstacle_gain") next.motion.obstacle_gain = value;
  else if (key == "authority.a") next.authority.a = value;
  else if (key == "authority.b") next.authority.b = value;
  else if (key == "authority.c1") next.authority.c1 = value;
  else if (key == "authority.c2") next.authority.c2 = value;
  else if (key == "authority.g_plus") next.authority.g_plus = value;
  else if (key == "authority.g_minus") next.authority.g_minus = value;
  else if (key == "sim.noise_sigma") next.sim.noise_sigma = value;
  else if (key == "sim.noise_sigma_est") next.sim.noise_sigma_est = value;
  next.validate();
  cfg_ = std::move(next);
  return value;
}

SimTrace run_scenario(const ScenarioConfig& cfg, InputQueue* live_input) {
  Simulation sim(cfg);
  SimTrace trace;
  trace.records.reserve(static_cast<size_t>(cfg.steps()));
  std::optional<HumanInput> held;
  if (live_input) held = HumanInput{};
  while (!sim.finished()) {
    if (live_input) {
      if (auto in = live_input->drain()) held = *in;
    }
    trace.records.push_back(sim.step(held));
  }
  trace.meta = sim.meta();
  return trace;
}

}  // namespace sac
