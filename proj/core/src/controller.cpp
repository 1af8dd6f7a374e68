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

#include "sac/controller.hpp"

#include <algorithm>
#include <cmath>

namespace sac {

void ControllerGains::validate() const {
  auto nonneg = [](const Diag6& d) { return (d.diagonal().array() >= 0.0).all(); };
  if (!(k_bar.diagonal().array() > 0.0).all()) throw ConfigError("controller.K_bar entries must be positive");
  if (!nonneg(d_bar) || !nonneg(k_max) || !nonneg(k_w) || !nonneg(k_i)) {
    throw ConfigError("controller gains must be non-negative");
  }
  if (!(integral_limit > 0.0)) throw ConfigError("controller.integral_limit must be positive");
}

void TankParams::validate() const {
  if (!(psi_lower > 0.0 && psi_upper > psi_lower)) {
    throw ConfigError("controller.psi_lower/psi_upper must satisfy 0 < lower < upper");
  }
  if (!(s_floor > 0.0)) throw ConfigError("controller.s_floor must be positive");
}

EnergyTank EnergyTank::full(const TankParams& p) { return {std::sqrt(2.0 * p.psi_upper), p}; }

Vec6 force_error(const Vec6& w_ref, const Vec6& w_int, const Vec6& w_d, ForceAxes axes) {
  const Vec6 err = w_ref - w_int;
  if (axes == ForceAxes::kAll) return err;
  Vec6 out = Vec6::Zero();
  for (int part = 0; part < 6; part += 3) {
    const Vec3 d = w_d.segment<3>(part);
    const double n = d.norm();
    if (n > 0.0) {
      const Vec3 dir = d / n;
      out.segment<3>(part) = dir * dir.dot(err.segment<3>(part));
    }
  }
  return out;
}

TankFlags tank_flags(const EnergyTank& tank, const Vec6& e_dot, const Vec6& w_ref) {
  const double psi = tank.energy();
  return {psi <= tank.params.psi_upper, psi >= tank.params.psi_lower, e_dot.dot(w_ref) < 0.0};
}

namespace {

// Impedance and force-tracking terms gated by zeta, without the zeta factor.
Vec6 tank_fed_terms(const Vec6& e, const Vec6& e_dot, const Vec6& w_err, const Vec6& w_ref, double alpha_h,
                    const ControllerState& st, const ControllerGains& g) {
  const Impedance imp = variable_impedance(alpha_h, g.k_max);
  const double ff = st.flags.phi ? 0.0 : 1.0;
  return -(imp.stiffness * e) - imp.damping * e_dot + ff * w_ref + g.k_w * w_err +
         g.k_i * st.wrench_error_integral;
}

}  // namespace

Vec6 auxiliary_input(const Vec6& e, const Vec6& e_dot, const Vec6& w_err, const Vec6& w_ref, double alpha_h,
                     const ControllerState& st, const ControllerGains& g) {
  Vec6 u = Vec6::Zero();
  if (st.flags.zeta) u += tank_fed_terms(e, e_dot, w_err, w_ref, alpha_h, st, g);
  if (st.flags.phi) u += w_ref;
  return u;
}

double tank_rate(const ControllerState& st, const Vec6& e, const Vec6& e_dot, const Vec6& w_err,
                 const Vec6& w_ref, double alpha_h, const ControllerGains& g) {
  const double s = st.tank.s;
  double power = 0.0;
  if (st.flags.gamma) {
    power += e_dot.dot(g.d_bar * e_dot);
    if (st.flags.phi) power -= e_dot.dot(w_ref);
  }
  if (st.flags.zeta) power -= e_dot.dot(tank_fed_terms(e, e_dot, w_err, w_ref, alpha_h, st, g));
  // Above the ceiling the tank stops storing; surplus is dissipated.
  if (!st.flags.gamma) power = std::min(power, 0.0);
  return power / s;
}

ControllerState tank_step(const ControllerState& st, const Vec6& e, const Vec6& e_dot, const Vec6& w_err,
                          const Vec6& w_ref, double alpha_h, const ControllerGains& g, double dt) {
  ControllerState next = st;
  // Stepping the energy psi = s^2/2 rather than s keeps the discrete
  // balance exact: psi' - psi = s sdot dt.
  const double s_dot = tank_rate(st, e, e_dot, w_err, w_ref, alpha_h, g);
  const double floor = st.tank.params.s_floor;
  const double psi = std::max(st.tank.energy() + st.tank.s * s_dot * dt, 0.5 * floor * floor);
  next.tank.s = std::sqrt(2.0 * psi);
  next.wrench_error_integral =
      (st.wrench_error_integral + w_err * dt).cwiseMax(-g.integral_limit).cwiseMin(g.integral_limit);
  next.flags = tank_flags(next.tank, e_dot, w_ref);
  return next;
}

Vec6 control_wrench_from_error(const Vec6& e, const Vec6& e_dot, const Vec6& vel_ref, const Vec6& acc_ref,
                               const PlantModel& plant, const Vec6& u, const ControllerGains& g) {
  return plant.inertia * acc_ref + plant.coriolis * vel_ref + plant.gravity - g.k_bar * e - g.d_bar * e_dot + u;
}

Vec6 control_wrench(const Vec6& pose_ref, const Vec6& vel_ref, const Vec6& acc_ref, const Vec6& pose,
                    const Vec6& vel, const PlantModel& plant, const Vec6& u, const ControllerGains& g) {
  return control_wrench_from_error(pose_diff(pose, pose_ref), vel - vel_ref, vel_ref, acc_ref, plant, u, g);
}

double storage(const Vec6& e, const Vec6& e_dot, double s, const PlantModel& plant, const ControllerGains& g) {
  return 0.5 * e_dot.dot(plant.inertia * e_dot) + 0.5 * e.dot(g.k_bar * e) + 0.5 * s * s;
}

double passivity_residual(double v_prev, double v_now, const Vec6& e_dot, const Vec6& w_env, double dt) {
  return (v_now - v_prev) / dt - e_dot.dot(w_env);
}

}  // namespace sac
