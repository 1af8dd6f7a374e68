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

#include <Eigen/Dense>

#include <numbers>
#include <stdexcept>
#include <string>

namespace sac {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Diag6 = Eigen::DiagonalMatrix<double, 6>;

/// Base class of every error raised by the library. `kind()` is a stable
/// machine-readable tag (MalformedFile, DegenerateChord, ...).
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define SAC_DEFINE_ERROR(Name)                                      \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  }

SAC_DEFINE_ERROR(MalformedFile);
SAC_DEFINE_ERROR(LengthMismatch);
SAC_DEFINE_ERROR(NonFinite);
SAC_DEFINE_ERROR(DegenerateChord);
SAC_DEFINE_ERROR(DegeneratePosition);
SAC_DEFINE_ERROR(NonDiagonalKmax);
SAC_DEFINE_ERROR(ConfigError);
SAC_DEFINE_ERROR(MissingDataset);
SAC_DEFINE_ERROR(IoError);

#undef SAC_DEFINE_ERROR

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double kPi = std::numbers::pi;
  double r = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

/// Per-axis shortest angular difference a - b, wrapped to (-pi, pi].
inline Vec3 angle_diff(const Vec3& a, const Vec3& b) {
  return Vec3(wrap_angle(a.x() - b.x()), wrap_angle(a.y() - b.y()),
              wrap_angle(a.z() - b.z()));
}

/// Pose difference a ⊖ b: linear part subtracted, angular part wrapped.
inline Vec6 pose_diff(const Vec6& a, const Vec6& b) {
  Vec6 d;
  d.head<3>() = a.head<3>() - b.head<3>();
  d.tail<3>() = angle_diff(a.tail<3>(), b.tail<3>());
  return d;
}

inline Vec6 wrap_pose(Vec6 p) {
  for (int i = 3; i < 6; ++i) p[i] = wrap_angle(p[i]);
  return p;
}

inline bool is_diagonal(const Mat6& m) {
  return (m - Mat6(m.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
}

}  // namespace sac
