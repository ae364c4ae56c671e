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

#ifndef FORCELAB_QUASISTATICS_H_
#define FORCELAB_QUASISTATICS_H_

#include <stdexcept>

namespace forcelab::statics {

// Thrown for inputs outside the physical domain of the closed-form statics.
class StaticsError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Lumped rigid-body geometry of a humanoid pinned at a support pivot. All
// lever arms are measured from the pivot, which sits at x = 0 inside the
// foot support interval.
struct BodyGeometry {
  double total_mass = 35.0;       // kg
  double gravity_accel = 9.81;    // m/s^2
  double com_distance = 0.45;     // |r_CoM|, m
  double ee_distance = 1.0;       // |r_h|, m
  double ee_offset_angle = 0.0;   // angle of r_h from the CoM line, rad
  double support_min = -0.10;     // m
  double support_max = 0.15;      // m
  double friction_coeff = 0.7;

  double weight() const { return total_mass * gravity_accel; }
  bool inside_support(double x) const {
    return x >= support_min && x <= support_max;
  }
  // Throws StaticsError when an invariant does not hold.
  void validate() const;
};

// External force applied at the end effector. ground_angle is the angle of
// the force line below horizontal, so a nonzero angle presses the robot
// into the ground. direction_sign selects a pull toward -x or +x.
struct HandForce {
  double magnitude = 0.0;     // N
  double ground_angle = 0.0;  // rad, [0, pi/2)
  int direction_sign = 1;     // -1 or +1

  double horizontal() const;  // signed x component
  double vertical() const;    // signed z component (<= 0)
  void validate() const;
};

struct EquilibriumSolution {
  double support_force = 0.0;   // vertical ground reaction, N
  double friction_force = 0.0;  // signed horizontal ground reaction, N
  bool slip = false;
};

struct TiltTarget {
  double beta = 0.0;  // angle of r_CoM above the ground plane, rad
  bool clamped = false;
};

// Force balance: gravity plus the vertical share of the hand force is carried
// by the support, the horizontal share by friction.
EquilibriumSolution solve_support_reactions(const BodyGeometry& geom,
                                            const HandForce& f);

// Quasi-static zero-moment point along x for a body whose lumped CoM is at
// com_x and whose end effector sits at (ee_x, ee_height). Balanced iff the
// result lies inside [support_min, support_max].
double zmp_location(const BodyGeometry& geom, const HandForce& f,
                    double com_x, double ee_height, double ee_x = 0.0);

// Equilibrium torso tilt for the applied force, limited to
// [beta_lim, pi/2]. The arccos argument is clamped to [0, 1] first.
TiltTarget expected_tilt(const BodyGeometry& geom, const HandForce& f,
                         double beta_lim);

// Gaussian tilt-tracking kernel, in (0, 1].
double fat2_reward(double beta_target, double beta_actual, double sigma);

// Largest hand force that can be balanced at the lean limit beta_lim.
double max_interactive_force(const BodyGeometry& geom, double force_angle,
                             double beta_lim);

// Net moment about the pivot, including the horizontal end-effector offset
// term. Zero at equilibrium.
double torque_residual_full(const BodyGeometry& geom, const HandForce& f,
                            double beta, double ee_height,
                            double ee_horizontal);

// Same as above with ee_horizontal = 0 and ee_height = |r_h| cos(phi).
double torque_residual_simplified(const BodyGeometry& geom, const HandForce& f,
                                  double beta);

}  // namespace forcelab::statics

#endif  // FORCELAB_QUASISTATICS_H_
