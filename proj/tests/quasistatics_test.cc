// Copyright 2026 The Forcelab Authors
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

#include "forcelab/quasistatics.h"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.h"

namespace forcelab::statics {
namespace {

constexpr double kPi = std::numbers::pi;

BodyGeometry worked_geometry() {
  BodyGeometry g;
  g.total_mass = 343.35 / 9.81;
  g.gravity_accel = 9.81;
  g.com_distance = 0.45;
  g.ee_distance = 1.0;
  return g;
}

// Root of the full moment balance in [lo, hi] by bisection.
double solve_full(const BodyGeometry& g, const HandForce& f, double ee_height,
                  double ee_horizontal, double beta_lim) {
  double lo = beta_lim;
  double hi = kPi / 2.0;
  auto r = [&](double b) { return torque_residual_full(g, f, b, ee_height, ee_horizontal); };
  if (r(lo) >= 0.0) return beta_lim;  // cannot balance above the lean limit
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (r(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TEST(ExpectedTilt, WorkedValueHalfArgument) {
  const BodyGeometry g = worked_geometry();
  const double f = 343.35 * 0.45 / 2.0;  // 77.25375 N, quoted as 77.254
  EXPECT_NEAR(expected_tilt(g, {f, 0.0, 1}, 0.9).beta, kPi / 3.0, 1e-9);
  // The three-decimal rounding alone moves the angle by ~1.9e-6 rad.
  EXPECT_NEAR(expected_tilt(g, {77.254, 0.0, 1}, 0.9).beta, kPi / 3.0, 5e-6);
}

TEST(ExpectedTilt, MatchesScalarOracle) {
  BodyGeometry g;
  g.ee_offset_angle = 0.2;
  for (double f = 0.0; f <= 120.0; f += 7.5) {
    for (double alpha : {0.0, 0.3, 0.7}) {
      const double want = std::max(0.9, oracle::tilt(f, g.weight(), g.com_distance,
                                                     g.ee_distance, 0.2, alpha));
      EXPECT_NEAR(expected_tilt(g, {f, alpha, -1}, 0.9).beta, want, 1e-12);
    }
  }
}

TEST(ExpectedTilt, ZeroForceIsUpright) {
  const TiltTarget t = expected_tilt(BodyGeometry{}, {0.0, 0.0, 1}, 0.9);
  EXPECT_DOUBLE_EQ(t.beta, kPi / 2.0);
  EXPECT_FALSE(t.clamped);
}

TEST(ExpectedTilt, ClampsAtLeanLimit) {
  const TiltTarget t = expected_tilt(BodyGeometry{}, {500.0, 0.0, 1}, 0.9);
  EXPECT_DOUBLE_EQ(t.beta, 0.9);
  EXPECT_TRUE(t.clamped);
}

TEST(ExpectedTilt, NonIncreasingInForce) {
  const BodyGeometry g;
  double prev = kPi / 2.0;
  for (double f = 0.0; f < 300.0; f += 0.5) {
    const double b = expected_tilt(g, {f, 0.1, 1}, 0.6).beta;
    EXPECT_LE(b, prev + 1e-15);
    EXPECT_GE(b, 0.6);
    prev = b;
  }
}

TEST(ExpectedTilt, RejectsBadLeanLimit) {
  EXPECT_THROW(expected_tilt(BodyGeometry{}, {1.0, 0.0, 1}, 0.0), StaticsError);
  EXPECT_THROW(expected_tilt(BodyGeometry{}, {1.0, 0.0, 1}, 2.0), StaticsError);
}

TEST(MaxInteractiveForce, WorkedValue) {
  EXPECT_NEAR(max_interactive_force(worked_geometry(), 0.0, 0.9), 96.05, 0.01);
  const BodyGeometry g = worked_geometry();
  EXPECT_NEAR(max_interactive_force(g, 0.0, 0.9),
              oracle::force_at_tilt(0.9, 343.35, 0.45, 1.0, 0.0, 0.0), 1e-10);
}

TEST(MaxInteractiveForce, RoundTripThroughTilt) {
  BodyGeometry g;
  for (double lim : {0.2, 0.5, 0.9, 1.3}) {
    for (double alpha : {0.0, 0.4, 1.0}) {
      for (double phi : {0.0, 0.3}) {
        g.ee_offset_angle = phi;
        const double f = max_interactive_force(g, alpha, lim);
        EXPECT_NEAR(expected_tilt(g, {f, alpha, 1}, lim).beta, lim, 1e-9);
      }
    }
  }
}

TEST(MaxInteractiveForce, DecreasesWithLeanLimitAndAngle) {
  const BodyGeometry g;
  EXPECT_GT(max_interactive_force(g, 0.0, 0.5), max_interactive_force(g, 0.0, 0.9));
  EXPECT_LT(max_interactive_force(g, 0.0, 0.9), max_interactive_force(g, 0.5, 0.9));
}

TEST(MaxInteractiveForce, RejectsVerticalForceLine) {
  EXPECT_THROW(max_interactive_force(BodyGeometry{}, kPi / 2.0 - 1e-9, 0.9), StaticsError);
}

TEST(TorqueBalance, SimplifiedFormWithinBoundOfFull) {
  BodyGeometry g;
  double worst = 0.0;
  const double fmax = max_interactive_force(g, 0.0, 0.9);
  for (double f = 0.0; f <= 1.5 * fmax; f += fmax / 40.0) {
    for (double alpha = 0.0; alpha <= kPi / 4.0 + 1e-12; alpha += kPi / 40.0) {
      for (double d3 = 0.0; d3 <= 0.05 * g.ee_distance + 1e-12; d3 += 0.01 * g.ee_distance) {
        const HandForce hf{f, alpha, 1};
        const double full = solve_full(g, hf, g.ee_distance, d3, 0.9);
        const double simple = expected_tilt(g, hf, 0.9).beta;
        worst = std::max(worst, std::abs(full - simple));
      }
    }
  }
  EXPECT_LE(worst, 0.05);
}

TEST(TorqueBalance, ResidualVanishesAtExpectedTilt) {
  const BodyGeometry g;
  const HandForce f{60.0, 0.2, 1};
  const double b = expected_tilt(g, f, 0.3).beta;
  EXPECT_NEAR(torque_residual_simplified(g, f, b), 0.0, 1e-9);
}

TEST(Zmp, MatchesMomentOracle) {
  const BodyGeometry g;
  for (double f : {0.0, 15.0, 60.0}) {
    for (double alpha : {0.0, 0.5}) {
      for (int dir : {-1, 1}) {
        const HandForce hf{f, alpha, dir};
        for (double com_x : {-0.05, 0.0, 0.07}) {
          const double got = zmp_location(g, hf, com_x, 0.9, 0.2);
          const double want = oracle::zmp(g.weight(), com_x, 0.2, 0.9, hf.horizontal(),
                                          hf.vertical());
          EXPECT_NEAR(got, want, 1e-12);
        }
      }
    }
  }
}

TEST(Zmp, AffineInComPosition) {
  const BodyGeometry g;
  const HandForce hf{40.0, 0.3, -1};
  const double z0 = zmp_location(g, hf, 0.0, 1.0);
  const double z1 = zmp_location(g, hf, 0.1, 1.0);
  const double z2 = zmp_location(g, hf, 0.2, 1.0);
  EXPECT_NEAR(z2 - z1, z1 - z0, 1e-14);
  EXPECT_NEAR(zmp_location(g, hf, -0.3, 1.0) - z0, -3.0 * (z1 - z0), 1e-13);
}

TEST(Zmp, AffineInForceMagnitudeAtZeroAngle) {
  const BodyGeometry g;
  const double a = zmp_location(g, {0.0, 0.0, 1}, 0.02, 1.0);
  const double b = zmp_location(g, {10.0, 0.0, 1}, 0.02, 1.0);
  const double c = zmp_location(g, {20.0, 0.0, 1}, 0.02, 1.0);
  EXPECT_NEAR(c - b, b - a, 1e-14);
}

TEST(Zmp, PullShiftsZmpTowardPull) {
  const BodyGeometry g;
  EXPECT_LT(zmp_location(g, {30.0, 0.0, -1}, 0.0, 1.0), 0.0);
  EXPECT_GT(zmp_location(g, {30.0, 0.0, 1}, 0.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(zmp_location(g, {0.0, 0.0, 1}, 0.04, 1.0), 0.04);
}

TEST(Zmp, WorkedExample) {
  // 50 N backward pull at the hand 1 m up, CoM over the pivot.
  EXPECT_NEAR(zmp_location(BodyGeometry{}, {50.0, 0.0, -1}, 0.0, 1.0), -50.0 / 343.35, 1e-12);
}

TEST(Zmp, RejectsDegenerateInputs) {
  const BodyGeometry g;
  EXPECT_THROW(zmp_location(g, {10.0, 0.0, 1}, 0.0, 0.0), StaticsError);
  EXPECT_THROW(zmp_location(g, {10.0, 0.0, 1}, 0.0, -0.5), StaticsError);
}

TEST(SupportReactions, ForceBalance) {
  const BodyGeometry g;
  const HandForce f{100.0, 0.4, -1};
  const EquilibriumSolution s = solve_support_reactions(g, f);
  EXPECT_NEAR(s.support_force + f.vertical() - g.weight(), 0.0, 1e-12);
  EXPECT_NEAR(s.friction_force + f.horizontal(), 0.0, 1e-12);
  EXPECT_FALSE(s.slip);
  EXPECT_TRUE(solve_support_reactions(g, {300.0, 0.0, 1}).slip);
}

TEST(Fat2Reward, KernelShape) {
  EXPECT_DOUBLE_EQ(fat2_reward(1.0, 1.0, 0.05), 1.0);
  EXPECT_NEAR(fat2_reward(1.0, 1.05, 0.05), fat2_reward(1.0, 0.95, 0.05), 1e-15);
  EXPECT_LT(fat2_reward(1.0, 1.2, 0.05), fat2_reward(1.0, 1.1, 0.05));
  EXPECT_GE(fat2_reward(1.0, 3.0, 0.05), 0.0);
}

TEST(Geometry, ValidatesInvariants) {
  BodyGeometry g;
  EXPECT_NO_THROW(g.validate());
  g.support_min = 0.01;
  EXPECT_THROW(g.validate(), StaticsError);
  g = BodyGeometry{};
  g.total_mass = -1.0;
  EXPECT_THROW(g.validate(), StaticsError);
}

}  // namespace
}  // namespace forcelab::statics
