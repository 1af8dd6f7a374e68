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

#include <gtest/gtest.h>

#include <random>

namespace sac {
namespace {

Vec6 w(double a, double b = 0, double c = 0) { return (Vec6() << a, b, c, 0, 0, 0).finished(); }

TEST(WrenchDifference, Cases) {
  AuthorityParams p;
  const Vec6 s = w(1, 2, 3);
  EXPECT_EQ(wrench_difference(s, s, s, p), 0.0);
  p.c1 = 1.0;
  EXPECT_DOUBLE_EQ(wrench_difference(s, s + w(10), s, p), 10.0);
  p.c2 = 2.0;
  EXPECT_DOUBLE_EQ(wrench_difference(s, s, s + w(0, 5), p), 10.0);
}

TEST(RawAuthority, Values) {
  AuthorityParams p;
  EXPECT_DOUBLE_EQ(raw_authority(p.a + p.b, p), 0.5);
  EXPECT_NEAR(raw_authority(0.0, p), 0.5 * (1.0 + std::tanh(-4.5)), 1e-15);
  EXPECT_NEAR(raw_authority(0.0, p), 1.23e-4, 1e-6);
  EXPECT_GE(raw_authority(p.a + p.b + 3.0 * p.a, p), 0.5 * (1.0 + std::tanh(3.0)));
  EXPECT_GE(raw_authority(1e9, p), 0.0);
  EXPECT_LE(raw_authority(1e9, p), 1.0);
}

TEST(Update, Cases) {
  AuthorityParams p;
  AuthorityState s;
  s.alpha_h = 0.3;
  EXPECT_EQ(update_authority(s, 0.3, p).alpha_h, 0.3);
  s.alpha_h = 1.0;
  EXPECT_DOUBLE_EQ(update_authority(s, 0.0, p).alpha_h, 1.0 - p.g_minus);
  s.alpha_h = 0.0;
  EXPECT_EQ(update_authority(s, 0.0, p).alpha_h, 0.0);
  s.alpha_h = 0.5;
  EXPECT_DOUBLE_EQ(update_authority(s, 0.0, p).alpha_h, 0.5 - (p.g_minus + p.g_minus * 0.25) * 0.5);
  EXPECT_DOUBLE_EQ(update_authority(s, 1.0, p).alpha_h, 0.5 + p.g_plus * 0.5);
}

TEST(Update, StaysInUnitIntervalAndContracts) {
  AuthorityParams p;
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100000; ++k) {
    AuthorityState s;
    s.alpha_h = u(rng);
    const double target = u(rng);
    const double next = update_authority(s, target, p).alpha_h;
    ASSERT_GE(next, 0.0);
    ASSERT_LE(next, 1.0);
    ASSERT_LE(std::abs(next - target), std::abs(s.alpha_h - target));
  }
}

TEST(Update, RiseFasterThanDecay) {
  AuthorityParams p;
  AuthorityState s;
  int rise = 0;
  while (s.alpha_h <= 0.9) {
    s = update_authority(s, 1.0, p);
    ++rise;
  }
  int decay = 0;
  while (s.alpha_h >= 0.1) {
    s = update_authority(s, 0.0, p);
    ++decay;
  }
  EXPECT_GE(decay, 2 * rise);
}

TEST(Impedance, Endpoints) {
  const Diag6 k_max(Vec6::Constant(400.0));
  const Impedance z0 = variable_impedance(0.0, k_max);
  EXPECT_EQ(z0.stiffness.diagonal(), k_max.diagonal());
  EXPECT_EQ(z0.damping.diagonal(), Vec6::Constant(40.0));
  const Impedance z1 = variable_impedance(1.0, k_max);
  EXPECT_EQ(z1.stiffness.diagonal(), Vec6::Zero());
  EXPECT_EQ(z1.damping.diagonal(), Vec6::Zero());
  const Impedance zq = variable_impedance(0.75, k_max);
  EXPECT_DOUBLE_EQ(zq.stiffness.diagonal()[0], 100.0);
  EXPECT_DOUBLE_EQ(zq.damping.diagonal()[0], 20.0);
}

TEST(Impedance, NonDiagonalKmaxRejected) {
  Mat6 k = Mat6::Identity();
  k(0, 1) = 1.0;
  EXPECT_THROW(variable_impedance(0.5, k), NonDiagonalKmax);
  EXPECT_NO_THROW(variable_impedance(0.5, Mat6(Mat6::Identity())));
}

TEST(Params, Validation) {
  AuthorityParams p;
  p.g_minus = 0.6;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.g_plus = 0.001;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.a = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
}

}  // namespace
}  // namespace sac
