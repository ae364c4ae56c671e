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

#include <algorithm>
#include <cmath>
#include <numbers>

namespace forcelab::statics {
namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kLeverTolerance = 1e-6;

}  // namespace

void BodyGeometry::validate() const {
  if (!(total_mass > 0.0)) throw StaticsError("total_mass must be > 0");
  if (!(gravity_accel > 0.0)) throw StaticsError("gravity_accel must be > 0");
  if (!(com_distance > 0.0)) throw StaticsError("com_distance must be > 0");
  if (!(ee_distance > 0.0)) throw StaticsError("ee_distance must be > 0");
  if (!(support_min < 0.0 && support_max > 0.0)) {
    throw StaticsError("support interval must contain the pivot");
  }
  if (!(ee_offset_angle >= 0.0 && ee_offset_angle < kHalfPi)) {
    throw StaticsError("ee_offset_angle must lie in [0, pi/2)");
  }
  if (!(friction_coeff > 0.0)) throw StaticsError("friction_coeff must be > 0");
}

double HandForce::horizontal() const {
  return direction_sign * magnitude * std::cos(ground_angle);
}

double HandForce::vertical() const {
  return -magnitude * std::sin(ground_angle);
}

void HandForce::validate() const {
  if (!(magnitude >= 0.0)) throw StaticsError("force magnitude must be >= 0");
  if (!(ground_angle >= 0.0 && ground_angle < kHalfPi)) {
    throw StaticsError("force ground_angle must lie in [0, pi/2)");
  }
  if (direction_sign != 1 && direction_sign != -1) {
    throw StaticsError("direction_sign must be -1 or +1");
  }
}

EquilibriumSolution solve_support_reactions(const BodyGeometry& geom,
                                            const HandForce& f) {
  EquilibriumSolution out;
  out.support_force = geom.weight() - f.vertical();
  out.friction_force = -f.horizontal();
  out.slip =
      std::abs(out.friction_force) > geom.friction_coeff * out.support_force;
  return out;
}

double zmp_location(const BodyGeometry& geom, const HandForce& f,
                    double com_x, double ee_height, double ee_x) {
  if (!(ee_height > 0.0)) {
    throw StaticsError("end-effector height must be > 0");
  }
  const double weight = geom.weight();
  const double fx = f.horizontal();
  const double fz = f.vertical();
  const double load = weight - fz;
  if (!(load > 0.0)) {
    throw StaticsError("total vertical load must be > 0");
  }
  // Moment balance about the pivot with the ground reaction acting at the ZMP.
  return (weight * com_x - ee_x * fz + ee_height * fx) / load;
}

TiltTarget expected_tilt(const BodyGeometry& geom, const HandForce& f,
                         double beta_lim) {
  if (!(beta_lim > 0.0 && beta_lim < kHalfPi)) {
    throw StaticsError("beta_lim must lie in (0, pi/2)");
  }
  const double arg = f.magnitude * geom.ee_distance *
                     std::cos(geom.ee_offset_angle) *
                     std::cos(f.ground_angle) /
                     (geom.weight() * geom.com_distance);
  TiltTarget out;
  const double clamped_arg = std::clamp(arg, 0.0, 1.0);
  out.clamped = clamped_arg != arg;
  const double raw = std::acos(clamped_arg);
  if (raw < beta_lim) {
    out.beta = beta_lim;
    out.clamped = true;
  } else {
    out.beta = std::min(raw, kHalfPi);
  }
  return out;
}

double fat2_reward(double beta_target, double beta_actual, double sigma) {
  if (!(sigma > 0.0)) throw StaticsError("sigma must be > 0");
  const double gap = beta_target - beta_actual;
  return std::exp(-gap * gap / sigma);
}

double max_interactive_force(const BodyGeometry& geom, double force_angle,
                             double beta_lim) {
  if (!(beta_lim > 0.0 && beta_lim < kHalfPi)) {
    throw StaticsError("beta_lim must lie in (0, pi/2)");
  }
  const double lever =
      std::cos(geom.ee_offset_angle) * std::cos(force_angle);
  if (lever <= kLeverTolerance) {
    throw StaticsError("force line nearly vertical; force bound undefined");
  }
  return geom.weight() * geom.com_distance * std::cos(beta_lim) /
         (geom.ee_distance * lever);
}

double torque_residual_full(const BodyGeometry& geom, const HandForce& f,
                            double beta, double ee_height,
                            double ee_horizontal) {
  return f.magnitude * ee_height * std::cos(f.ground_angle) +
         f.magnitude * ee_horizontal * std::sin(f.ground_angle) -
         geom.weight() * geom.com_distance * std::cos(beta);
}

double torque_residual_simplified(const BodyGeometry& geom, const HandForce& f,
                                  double beta) {
  return torque_residual_full(
      geom, f, beta, geom.ee_distance * std::cos(geom.ee_offset_angle), 0.0);
}

}  // namespace forcelab::statics
