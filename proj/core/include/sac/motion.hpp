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

#include "sac/transform.hpp"

#include <span>

namespace sac {

/// Bounding sphere of a detected obstacle plus the preferred avoidance
/// direction (unit vector).
struct ObstacleSphere {
  Vec3 center = Vec3::Zero();
  double radius = 0.05;
  Vec3 v_dir = Vec3::UnitZ();

  void validate() const;
};

struct MotionParams {
  Mat3 gain_linear = 4.0 * Mat3::Identity();   // Λ_L, 1/s
  Mat3 gain_angular = 4.0 * Mat3::Identity();  // Λ_A, 1/s
  double v_th = 0.5;                           // m/s
  double w_th = 0.05;                          // m + rad
  double lambda_cap = 50.0;                    // 1/s
  /// Numerator of the repulsion gain, lambda = obstacle_gain / (d - r).
  /// 1.0 is the plain reciprocal distance.
  double obstacle_gain = 1.0;

  void validate() const;
};

struct ReferenceOutput {
  Vec3 x_dot_ref = Vec3::Zero();
  Vec3 theta_dot_ref = Vec3::Zero();
  Vec6 w_ref = Vec6::Zero();
  Eigen::Index i_min = 0;
  double beta = 0.0;
  // Diagnostics.
  Vec3 v_fb = Vec3::Zero();
  Vec3 v_ff = Vec3::Zero();
  Vec3 v_obs = Vec3::Zero();
  bool guidance_active = false;
};

struct FeedbackVelocity {
  Vec3 linear;
  Vec3 angular;
};

FeedbackVelocity feedback_velocity(const Vec3& x, const Vec3& theta, const TransformedDemo& td,
                                   Eigen::Index i_min, const MotionParams& p);

FeedbackVelocity feedforward_velocity(const TransformedDemo& td, Eigen::Index i_min);

/// Repulsion gain: obstacle_gain / (|x - c| - r), capped at lambda_cap and
/// equal to the cap on or inside the sphere.
double repulsion_gain(double distance_to_center, double radius, const MotionParams& p);

struct ObstacleTerms {
  Vec3 velocity = Vec3::Zero();  // v_r + v_g
  Vec3 normal = Vec3::Zero();
  double lambda = 0.0;
  bool guidance = false;  // k_g
};

ObstacleTerms obstacle_terms(const Vec3& x, const Vec3& v_ff, const ObstacleSphere& obs,
                             const MotionParams& p);
Vec3 obstacle_velocity(const Vec3& x, const Vec3& v_ff, const ObstacleSphere& obs, const MotionParams& p);

/// (1 - alpha)^2 * (v_fb + v_ff + v_obs), norm-clamped to v_th.
Vec3 reference_velocity(double alpha_h, const Vec3& v_fb, const Vec3& v_ff, const Vec3& v_obs,
                        const MotionParams& p);

Vec3 reference_angular_velocity(double alpha_h, const TransformedDemo& td, Eigen::Index i_min);

struct WrenchReference {
  Vec6 w_ref;
  double beta;
};

WrenchReference reference_wrench(double alpha_h, const Vec3& x, const Vec3& theta, const TransformedDemo& td,
                                 Eigen::Index i_min, const MotionParams& p);

ReferenceOutput generate(const Vec3& x, const Vec3& theta, const TransformedDemo& td,
                         std::span<const ObstacleSphere> obstacles, double alpha_h, const MotionParams& p);

/// Same as above with a precomputed nearest index (locality-window tracking).
ReferenceOutput generate_at(Eigen::Index i_min, const Vec3& x, const Vec3& theta, const TransformedDemo& td,
                            std::span<const ObstacleSphere> obstacles, double alpha_h, const MotionParams& p);

}  // namespace sac
