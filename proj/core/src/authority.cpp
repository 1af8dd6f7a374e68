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

#include "sac/authority.hpp"

#include <algorithm>
#include <cmath>

namespace sac {

void AuthorityParams::validate() const {
  if (!(a > 0.0 && b > 0.0 && c1 > 0.0 && c2 > 0.0)) {
    throw ConfigError("authority.a, b, c1, c2 must be positive");
  }
  if (!(g_plus > 0.0 && g_plus <= 1.0)) throw ConfigError("authority.g_plus must be in (0, 1]");
  if (!(g_minus > 0.0 && g_minus <= 0.5)) throw ConfigError("authority.g_minus must be in (0, 0.5]");
  if (g_plus < g_minus) throw ConfigError("authority.g_plus must be >= g_minus");
}

double wrench_difference(const Vec6& w_s, const Vec6& w_est, const Vec6& w_ref, const AuthorityParams& p) {
  return p.c1 * (w_s - w_est).norm() + p.c2 * (w_ref - w_s).norm();
}

double raw_authority(double w_diff, const AuthorityParams& p) {
  const double v = 0.5 * (1.0 + std::tanh(3.0 / p.a * (w_diff - p.a - p.b)));
  return std::clamp(v, 0.0, 1.0);
}

AuthorityState update_authority(const AuthorityState& state, double alpha_hat, const AuthorityParams& p) {
  const double prev = state.alpha_h;
  double gain = p.g_plus;
  if (!(alpha_hat > prev)) {
    const double r = 1.0 - prev;
    gain = p.g_minus + p.g_minus * r * r;
  }
  AuthorityState next = state;
  next.alpha_h = std::clamp(prev + gain * (alpha_hat - prev), 0.0, 1.0);
  return next;
}

Impedance variable_impedance(double alpha_h, const Diag6& k_max) {
  Impedance out;
  out.stiffness.diagonal() = (1.0 - alpha_h) * k_max.diagonal();
  out.damping.diagonal() = 2.0 * out.stiffness.diagonal().cwiseSqrt();
  return out;
}

Impedance variable_impedance(double alpha_h, const Mat6& k_max) {
  if (!is_diagonal(k_max)) throw NonDiagonalKmax("K_max must be diagonal");
  return variable_impedance(alpha_h, Diag6(k_max.diagonal()));
}

}  // namespace sac
