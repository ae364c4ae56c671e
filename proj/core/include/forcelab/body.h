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

#ifndef FORCELAB_BODY_H_
#define FORCELAB_BODY_H_

#include <array>
#include <string>

#include <Eigen/Core>

#include "forcelab/quasistatics.h"

namespace forcelab::sim {

inline constexpr int kNumJoints = 6;

// Joint order is fixed as [lower | waist | upper].
enum JointIndex : int {
  kAnkle = 0,
  kKnee = 1,
  kHip = 2,
  kWaist = 3,
  kShoulder = 4,
  kElbow = 5,
};

struct AgentSlice {
  int offset;
  int size;
};
inline constexpr AgentSlice kLowerSlice{0, 3};
inline constexpr AgentSlice kWaistSlice{3, 1};
inline constexpr AgentSlice kUpperSlice{4, 2};

using JointVector = std::array<double, kNumJoints>;
using Vec2 = Eigen::Vector2d;  // (x, z)

// A revolute joint and the link distal to it.
struct JointSpec {
  std::string name;
  double lower = 0.0;         // rad
  double upper = 0.0;         // rad
  double torque_limit = 0.0;  // N m
  double link_length = 0.0;   // m
  double link_mass = 0.0;     // kg
  double kp = 0.0;
  double kd = 0.0;
  double nominal = 0.0;  // rad
};

// Sagittal chain pinned at the ankle: shank, thigh, pelvis, torso, upper arm,
// forearm. Each joint angle is relative to the parent link; absolute link
// angles are measured from vertical, positive toward +x.
struct JointLayout {
  std::array<JointSpec, kNumJoints> joints;

  static JointLayout standard();

  double total_mass() const;
  double clamp(int joint, double q) const;
  JointVector nominal() const;
  void validate() const;  // throws std::invalid_argument
};

struct BodyPose {
  std::array<Vec2, kNumJoints> joint;     // pivot of each joint
  std::array<Vec2, kNumJoints> link_com;  // midpoint of each link
  std::array<double, kNumJoints> link_angle{};
  Vec2 hand = Vec2::Zero();
  Vec2 com = Vec2::Zero();

  double torso_pitch() const { return link_angle[kWaist]; }
  Vec2 pelvis() const { return joint[kHip]; }
};

BodyPose forward_kinematics(const JointLayout& layout, const JointVector& q);

// Generalized joint forces produced by gravity on every link and by a hand
// force (fx, fz). Positive values push the joint toward larger angles.
JointVector load_torques(const JointLayout& layout, const BodyPose& pose,
                         double gravity, const Vec2& hand_force);

// Rotational inertia of the distal subtree about each joint (slender rods).
JointVector effective_inertia(const JointLayout& layout, const BodyPose& pose);

// Planar velocity of a point rigidly attached distal to joints [0, last].
Vec2 point_velocity(const BodyPose& pose, const JointVector& dq,
                    const Vec2& point, int last_joint);

// Lumped lever arms of a pose: |r_CoM|, |r_h| and the angle between them.
// Mass, gravity, support and friction are copied from `base`.
statics::BodyGeometry lumped_geometry(const JointLayout& layout,
                                      const BodyPose& pose,
                                      const statics::BodyGeometry& base);

}  // namespace forcelab::sim

#endif  // FORCELAB_BODY_H_
