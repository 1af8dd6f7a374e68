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

/// Arbitration parameters. Defaults are tuned for a 1 kHz loop.
struct AuthorityParams {
  double a = 4.0;  // slope, N
  double b = 2.0;  // deadband, N
  double c1 = 1.0;
  double c2 = 0.5;
  double g_plus = 0.02;
  double g_minus = 0.002;

  void validate() const;
};

struct AuthorityState {
  double alpha_h = 0.0;
  double last_w_diff = 0.0;
};

/// c1 |w_s - w_est| + c2 |w_ref - w_s|.
///
/// All three wrenches must share one sign convention; the simulator passes
/// the wrench the end-effector exerts (see `interaction_wrench`).
double wrench_difference(const Vec6& w_s, const Vec6& w_est, const Vec6& w_ref, const AuthorityParams& p);

/// Target authority 0.5 (1 + tanh(3/a (w_diff - a - b))).
double raw_authority(double w_diff, const AuthorityParams& p);

/// One step of the asymmetric recursive filter toward `alpha_hat`.
AuthorityState update_authority(const AuthorityState& state, double alpha_hat, const AuthorityParams& p);

struct Impedance {
  Diag6 stiffness;
  Diag6 damping;
};

/// K = (1 - alpha) K_max, D = 2 sqrt(K). K_max must be diagonal.
Impedance variable_impedance(double alpha_h, const Mat6& k_max);
Impedance variable_impedance(double alpha_h, const Diag6& k_max);

}  // namespace sac
