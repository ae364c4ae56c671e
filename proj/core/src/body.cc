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

#include "forcelab/body.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace forcelab::sim {
namespace {

Vec2 direction(double angle) { return Vec2(std::sin(angle), std::cos(angle)); }

// d(point)/d(q_j) for a point distal to joint j.
Vec2 rotation_jacobian(const Vec2& pivot, const Vec2& point) {
  const Vec2 r = point - pivot;
  return Vec2(r.y(), -r.x());
}

}  // namespace

JointLayout JointLayout::standard() {
  JointLayout l;
  //          name        lower  upper  tau    len   mass  kp     kd    nominal
  l.joints[kAnkle] = {"ankle", -0.75, 1.05, 200.0, 0.35, 3.5, 1000.0, 150.0, 0.15};
  l.joints[kKnee] = {"knee", -1.20, 0.00, 200.0, 0.35, 6.5, 800.0, 90.0, -0.30};
  l.joints[kHip] = {"hip", -0.60, 1.20, 150.0, 0.12, 7.0, 600.0, 40.0, 0.15};
  l.joints[kWaist] = {"waist", -0.60, 0.60, 120.0, 0.30, 12.0, 400.0, 20.0, 0.0};
  l.joints[kShoulder] = {"shoulder", 1.20, 3.20, 40.0, 0.22, 3.0, 150.0, 5.0, 2.50};
  l.joints[kElbow] = {"elbow", -2.00, 0.30, 30.0, 0.22, 3.0, 60.0, 1.5, -1.00};
  return l;
}

double JointLayout::total_mass() const {
  double m = 0.0;
  for (const auto& j : joints) m += j.link_mass;
  return m;
}

double JointLayout::clamp(int joint, double q) const {
  return std::clamp(q, joints[joint].lower, joints[joint].upper);
}

JointVector JointLayout::nominal() const {
  JointVector q{};
  for (int j = 0; j < kNumJoints; ++j) q[j] = joints[j].nominal;
  return q;
}

void JointLayout::validate() const {
  for (const auto& j : joints) {
    if (!(j.lower < j.upper)) {
      throw std::invalid_argument("joint " + j.name + ": lower >= upper");
    }
    if (j.nominal < j.lower || j.nominal > j.upper) {
      throw std::invalid_argument("joint " + j.name + ": nominal outside limits");
    }
    if (!(j.torque_limit > 0.0 && j.link_length > 0.0 && j.link_mass > 0.0)) {
      throw std::invalid_argument("joint " + j.name +
                                  ": torque, length and mass must be > 0");
    }
    if (!(j.kp > 0.0 && j.kd > 0.0)) {
      throw std::invalid_argument("joint " + j.name + ": gains must be > 0");
    }
  }
}

BodyPose forward_kinematics(const JointLayout& layout, const JointVector& q) {
  BodyPose pose;
  Vec2 pivot = Vec2::Zero();
  double angle = 0.0;
  double mass = 0.0;
  Vec2 moment = Vec2::Zero();
  for (int j = 0; j < kNumJoints; ++j) {
    const JointSpec& spec = layout.joints[j];
    angle += q[j];
    const Vec2 axis = direction(angle);
    pose.joint[j] = pivot;
    pose.link_angle[j] = angle;
    pose.link_com[j] = pivot + 0.5 * spec.link_length * axis;
    moment += spec.link_mass * pose.link_com[j];
    mass += spec.link_mass;
    // The arm hangs from the shoulder, i.e. the top of the torso.
    pivot = pivot + spec.link_length * axis;
  }
  pose.hand = pivot;
  pose.com = moment / mass;
  return pose;
}

JointVector load_torques(const JointLayout& layout, const BodyPose& pose,
                         double gravity, const Vec2& hand_force) {
  JointVector tau{};
  for (int j = 0; j < kNumJoints; ++j) {
    double t = rotation_jacobian(pose.joint[j], pose.hand).dot(hand_force);
    for (int i = j; i < kNumJoints; ++i) {
      const Vec2 weight(0.0, -layout.joints[i].link_mass * gravity);
      t += rotation_jacobian(pose.joint[j], pose.link_com[i]).dot(weight);
    }
    tau[j] = t;
  }
  return tau;
}

JointVector effective_inertia(const JointLayout& layout, const BodyPose& pose) {
  JointVector inertia{};
  for (int j = 0; j < kNumJoints; ++j) {
    double acc = 0.0;
    for (int i = j; i < kNumJoints; ++i) {
      const JointSpec& s = layout.joints[i];
      acc += s.link_mass * ((pose.link_com[i] - pose.joint[j]).squaredNorm() +
                            s.link_length * s.link_length / 12.0);
    }
    inertia[j] = acc;
  }
  return inertia;
}

Vec2 point_velocity(const BodyPose& pose, const JointVector& dq,
                    const Vec2& point, int last_joint) {
  Vec2 v = Vec2::Zero();
  for (int j = 0; j <= last_joint; ++j) {
    v += dq[j] * rotation_jacobian(pose.joint[j], point);
  }
  return v;
}

statics::BodyGeometry lumped_geometry(const JointLayout& layout,
                                      const BodyPose& pose,
                                      const statics::BodyGeometry& base) {
  statics::BodyGeometry g = base;
  g.total_mass = layout.total_mass();
  g.com_distance = pose.com.norm();
  g.ee_distance = pose.hand.norm();
  const double com_angle = std::atan2(pose.com.x(), pose.com.y());
  const double hand_angle = std::atan2(pose.hand.x(), pose.hand.y());
  g.ee_offset_angle = std::abs(hand_angle - com_angle);
  return g;
}

}  // namespace forcelab::sim
