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
#include "sac/plant.hpp"

namespace sac {

/// Axes the force loop (K_w, K_i terms) acts on.
enum class ForceAxes {
  kReference,  // along the demonstrated wrench at the nearest point only
  kAll,        // every axis
};

struct ControllerGains {
  Diag6 k_bar = Diag6(Vec6((Vec6() << 50, 50, 50, 5, 5, 5).finished()));
  Diag6 d_bar = Diag6(Vec6(2.0 * k_bar.diagonal().cwiseSqrt()));
  Diag6 k_max = Diag6(Vec6((Vec6() << 800, 800, 800, 30, 30, 30).finished()));
  Diag6 k_w = Diag6(Vec6::Constant(0.5));
  Diag6 k_i = Diag6(Vec6::Constant(2.0));
  double integral_limit = 50.0;  // elementwise clamp on the wrench-error integral
  ForceAxes force_axes = ForceAxes::kReference;

  void validate() const;
};

struct TankParams {
  double psi_lower = 10.0;  // J
  double psi_upper = 20.0;  // J
  double s_floor = 0.1;     // sqrt(J)

  void validate() const;
};

struct EnergyTank {
  double s = 0.0;
  TankParams params;

  double energy() const { return 0.5 * s * s; }
  /// Tank filled to psi_upper.
  static EnergyTank full(const TankParams& p);
};

struct TankFlags {
  bool gamma = true;  // storing allowed (psi <= psi_upper)
  bool zeta = true;   // extraction allowed (psi >= psi_lower)
  bool phi = false;   // reference wrench is dissipative (edot . w_ref < 0)
};

struct ControllerState {
  Vec6 wrench_error_integral = Vec6::Zero();
  EnergyTank tank;
  TankFlags flags;
  double last_passivity_residual = 0.0;
};

/// Force-tracking error w_ref - w_int, restricted per `axes`. For
/// kReference the force and torque parts are projected onto the directions
/// of the demonstrated wrench w_d; a zero part removes that block.
Vec6 force_error(const Vec6& w_ref, const Vec6& w_int, const Vec6& w_d, ForceAxes axes);

TankFlags tank_flags(const EnergyTank& tank, const Vec6& e_dot, const Vec6& w_ref);

/// Time-varying impedance and force-tracking input u.
///
/// `w_err` is the force-tracking error w_ref - w_int, with w_int the wrench
/// the end-effector exerts as reported by the wrist sensor.
Vec6 auxiliary_input(const Vec6& e, const Vec6& e_dot, const Vec6& w_err, const Vec6& w_ref, double alpha_h,
                     const ControllerState& st, const ControllerGains& g);

/// Right-hand side of the tank ODE, sdot. With gamma = 0 (tank above its
/// ceiling) inflow is discarded, so sdot <= 0.
double tank_rate(const ControllerState& st, const Vec6& e, const Vec6& e_dot, const Vec6& w_err,
                 const Vec6& w_ref, double alpha_h, const ControllerGains& g);

/// Explicit Euler step of the tank energy psi = s^2/2 (floored at
/// s_floor^2/2) and of the clamped wrench-error integral. Flags are
/// recomputed from the new energy.
ControllerState tank_step(const ControllerState& st, const Vec6& e, const Vec6& e_dot, const Vec6& w_err,
                          const Vec6& w_ref, double alpha_h, const ControllerGains& g, double dt);

/// w = M acc_ref + C vel_ref + g - K_bar e - D_bar edot + u, e = pose ⊖ pose_ref.
Vec6 control_wrench(const Vec6& pose_ref, const Vec6& vel_ref, const Vec6& acc_ref, const Vec6& pose,
                    const Vec6& vel, const PlantModel& plant, const Vec6& u, const ControllerGains& g);

Vec6 control_wrench_from_error(const Vec6& e, const Vec6& e_dot, const Vec6& vel_ref, const Vec6& acc_ref,
                               const PlantModel& plant, const Vec6& u, const ControllerGains& g);

/// v = 1/2 edot' M edot + 1/2 e' K_bar e + 1/2 s^2.
double storage(const Vec6& e, const Vec6& e_dot, double s, const PlantModel& plant, const ControllerGains& g);

/// (v_now - v_prev)/dt - edot . w_env. Positive values are generated power.
double passivity_residual(double v_prev, double v_now, const Vec6& e_dot, const Vec6& w_env, double dt);

/// 1e-3 W at dt = 1 ms, linear in dt.
inline double passivity_tolerance(double dt) { return 1e-3 * (dt / 1e-3); }

}  // namespace sac
