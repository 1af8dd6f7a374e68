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

#include "sac/motion.hpp"

#include <algorithm>
#include <cmath>

namespace sac {
namespace {

bool symmetric_positive_definite(const Mat3& m) {
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12) return false;
  Eigen::LLT<Mat3> llt(m);
  return llt.info() == Eigen::Success;
}

double authority_factor(double alpha_h) {
  const double r = 1.0 - alpha_h;
  return r * r;
}

}  // namespace

void ObstacleSphere::validate() const {
  if (!(radius > 0.0)) throw ConfigError("obstacle radius must be positive");
  if (std::abs(v_dir.norm() - 1.0) > 1e-9) throw ConfigError("obstacle v_dir must be a unit vector");
}

void MotionParams::validate() const {
  if (!symmetric_positive_definite(gain_linear)) throw ConfigError("motion.gain_linear must be SPD");
  if (!symmetric_positive_definite(gain_angular)) throw ConfigError("motion.gain_angular must be SPD");
  if (!(v_th > 0.0)) throw ConfigError("motion.v_th must be positive");
  if (!(w_th > 0.0)) throw ConfigError("motion.w_th must be positive");
  if (!(lambda_cap > 0.0)) throw ConfigError("motion.lambda_cap must be positive");
  if (!(obstacle_gain > 0.0)) throw ConfigError("motion.obstacle_gain must be positive");
}

FeedbackVelocity feedback_velocity(const Vec3& x, const Vec3& theta, const TransformedDemo& td,
                                   Eigen::Index i_min, const MotionParams& p) {
  return {p.gain_linear * (td.positions.col(i_min) - x),
          p.gain_angular * angle_diff(td.eulers.col(i_min), theta)};
}

FeedbackVelocity feedforward_velocity(const TransformedDemo& td, Eigen::Index i_min) {
  return {td.lin_vels.col(i_min), td.ang_vels.col(i_min)};
}

double repulsion_gain(double distance_to_center, double radius, const MotionParams& p) {
  const double clearance = distance_to_center - radius;
  if (clearance <= 0.0) return p.lambda_cap;
  return std::min(p.obstacle_gain / clearance, p.lambda_cap);
}

ObstacleTerms obstacle_terms(const Vec3& x, const Vec3& v_ff, const ObstacleSphere& obs,
                             const MotionParams& p) {
  const Vec3 offset = x - obs.center;
  const double dist = offset.norm();
  if (dist == 0.0) throw DegeneratePosition("position coincides with obstacle center");
  ObstacleTerms t;
  t.normal = offset / dist;
  t.lambda = repulsion_gain(dist, obs.radius, p);
  const Vec3& n = t.normal;
  t.guidance = v_ff.dot(n) <= 0.0;
  t.velocity = t.lambda * n;
  if (t.guidance) {
    Vec3 proj = obs.v_dir - obs.v_dir.dot(n) * n;
    const double speed = v_ff.norm();
    if (speed >= 1e-9) {
      const Vec3 u = v_ff / speed;
      proj += u - u.dot(n) * n;
    }
    t.velocity += t.lambda * proj;
  }
  return t;
}

Vec3 obstacle_velocity(const Vec3& x, const Vec3& v_ff, const ObstacleSphere& obs, const MotionParams& p) {
  return obstacle_terms(x, v_ff, obs, p).velocity;
}

Vec3 reference_velocity(double alpha_h, const Vec3& v_fb, const Vec3& v_ff, const Vec3& v_obs,
                        const MotionParams& p) {
  const Vec3 raw = authority_factor(alpha_h) * (v_fb + v_ff + v_obs);
  const double speed = raw.norm();
  if (speed <= p.v_th) return raw;
  Vec3 out = raw * (p.v_th / speed);
  // Rounding can leave |out| one ulp above v_th.
  while (out.norm() > p.v_th) out *= 1.0 - 1e-16;
  return out;
}

Vec3 reference_angular_velocity(double alpha_h, const TransformedDemo& td, Eigen::Index i_min) {
  return authority_factor(alpha_h) * td.ang_vels.col(i_min);
}

WrenchReference reference_wrench(double alpha_h, const Vec3& x, const Vec3& theta, const TransformedDemo& td,
                                 Eigen::Index i_min, const MotionParams& p) {
  const double err = (td.positions.col(i_min) - x).norm() + angle_diff(td.eulers.col(i_min), theta).norm();
  if (err > p.w_th) return {Vec6::Zero(), 0.0};
  const double beta = authority_factor(alpha_h);
  return {beta * td.wrenches.col(i_min), beta};
}

ReferenceOutput generate_at(Eigen::Index i_min, const Vec3& x, const Vec3& theta, const TransformedDemo& td,
                            std::span<const ObstacleSphere> obstacles, double alpha_h, const MotionParams& p) {
  ReferenceOutput out;
  out.i_min = i_min;
  const auto fb = feedback_velocity(x, theta, td, i_min, p);
  const auto ff = feedforward_velocity(td, i_min);
  out.v_fb = fb.linear;
  out.v_ff = ff.linear;
  for (const auto& obs : obstacles) {
    const auto terms = obstacle_terms(x, ff.linear, obs, p);
    out.v_obs += terms.velocity;
    out.guidance_active = out.guidance_active || terms.guidance;
  }
  out.x_dot_ref = reference_velocity(alpha_h, out.v_fb, out.v_ff, out.v_obs, p);
  out.theta_dot_ref = reference_angular_velocity(alpha_h, td, i_min);
  const auto wr = reference_wrench(alpha_h, x, theta, td, i_min, p);
  out.w_ref = wr.w_ref;
  out.beta = wr.beta;
  return out;
}

ReferenceOutput generate(const Vec3& x, const Vec3& theta, const TransformedDemo& td,
                         std::span<const ObstacleSphere> obstacles, double alpha_h, const MotionParams& p) {
  return generate_at(nearest_index(td, x), x, theta, td, obstacles, alpha_h, p);
}

}  // namespace sac
