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

#ifndef FORCELAB_SIM_H_
#define FORCELAB_SIM_H_

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "forcelab/body.h"
#include "forcelab/json.h"
#include "forcelab/quasistatics.h"

namespace forcelab::sim {

inline constexpr int kObservationSize = 26;
inline constexpr int kPrivilegedSize = 6;
inline constexpr int kCriticInputSize = kObservationSize + kPrivilegedSize;

// Observation scaling applied by Observation::to_vector.
inline constexpr double kJointVelocityScale = 0.1;
inline constexpr double kPitchRateScale = 0.25;
inline constexpr double kRootHeightScale = 10.0;
inline constexpr double kForceScale = 0.01;

struct Command {
  double v_lin_x = 0.0;      // m/s, [-0.6, 0.6]
  int mode = 0;              // 0 stand, 1 locomote
  double root_height = 0.0;  // m, pelvis height target
};

// Policy-visible state, identical for all three agents.
struct Observation {
  JointVector q{};
  JointVector dq{};
  double base_pitch_rate = 0.0;
  std::array<double, 2> gravity_projection{};  // (sin, cos) of torso pitch
  JointVector prev_action{};
  Command command;
  std::array<double, 2> upper_targets{};
  double nominal_root_height = 0.0;

  // Layout: q(6) dq(6) pitch_rate(1) gravity(2) prev_action(6)
  //         command(3) upper_targets(2).
  std::array<double, kObservationSize> to_vector() const;
};

// Critic-only information; never fed to actors.
struct PrivilegedObs {
  Vec2 base_lin_vel = Vec2::Zero();  // pelvis velocity (x, z), m/s
  double torso_pitch = 0.0;          // rad from vertical
  Vec2 hand_force = Vec2::Zero();    // (Fx, Fz), N
  double hand_height = 0.0;          // m

  // Layout: vel(2) pitch(1) force(2) hand_height(1).
  std::array<double, kPrivilegedSize> to_vector() const;
};

enum class Termination { kNone, kZmpExit, kPitchLimit, kSlip, kTimeout };
std::string to_string(Termination t);

struct Rewards {
  double lower = 0.0;
  double waist = 0.0;
  double upper = 0.0;
  double sum() const { return lower + waist + upper; }
};

struct StepResult {
  Observation observation;
  PrivilegedObs privileged;
  Rewards rewards;
  bool done = false;
  Termination termination = Termination::kNone;
  // Diagnostics of the final substep.
  double zmp_x = 0.0;
  double force_magnitude = 0.0;
  double torso_pitch = 0.0;
  double beta_actual = 0.0;
  double beta_target = 0.0;
};

// Gaussian force distribution of one curriculum stage.
struct ForceDistribution {
  double base_magnitude = 0.0;  // N
  double magnitude_std = 0.0;   // N
  double cap = 0.0;             // N, <= 0 disables the upper clamp
};

// Realized per-episode force profile: zero until onset, linear ramp, hold.
struct ForceSchedule {
  double magnitude = 0.0;     // N, held value
  double ground_angle = 0.0;  // rad
  int direction_sign = 1;
  int onset_step = 0;
  int ramp_steps = 0;

  double magnitude_at(int step) const;
  statics::HandForce at(int step) const;
};

struct ForceConfig {
  ForceDistribution stage1{15.0, 10.0, 30.0};
  ForceDistribution stage2{80.0, 25.0, 0.0};
  double angle_mean = 0.0;  // rad
  double angle_std = 0.15;  // rad
  double angle_max = 0.6;   // rad
  int onset_max_steps = 100;
  int ramp_steps = 100;
};

struct CommandConfig {
  double locomote_probability = 0.0;
  double v_max = 0.6;
  double height_range = 0.03;  // m below nominal pelvis height
};

struct UpperTargetConfig {
  double amplitude = 0.3;  // rad, bound on the summed sinusoids per joint
  int components = 3;
  double freq_min = 0.1;   // Hz
  double freq_max = 0.6;   // Hz
};

struct RewardConfig {
  bool fat2_enabled = true;
  double fat2_lower = 1.0;
  double fat2_waist = 1.0;
  double velocity = 0.5;
  double velocity_sigma = 0.02;
  double height = 0.5;
  double height_sigma = 0.005;
  double survival = 0.5;
  double waist_posture = 0.5;
  double waist_sigma = 0.05;
  double upper_tracking = 1.0;
  double upper_sigma = 0.05;
  double action_rate = 0.02;
  double joint_limit = 1.0;
  double joint_limit_margin = 0.05;  // rad
};

struct SimConfig {
  JointLayout layout = JointLayout::standard();
  statics::BodyGeometry geometry;  // mass, g, support, friction
  double beta_lim = 0.9;
  double fat2_sigma = 0.05;
  int substeps = 10;               // PD updates per policy step (500/50)
  double substep_dt = 0.002;       // s
  double action_scale = 0.5;       // rad per unit action
  double reset_jitter = 0.05;      // rad, uniform
  double pitch_limit = 1.2;        // rad from vertical
  int zmp_exit_substeps = 3;
  int max_episode_steps = 1000;
  CommandConfig command;
  UpperTargetConfig upper_targets;
  ForceConfig force;
  RewardConfig reward;

  double policy_dt() const { return substeps * substep_dt; }
  void validate() const;
};

// tau = kp (q_des - q) - kd dq, clamped to +-limit.
double pd_torque(double q_des, double q, double dq, double kp, double kd,
                 double limit);

// Inputs of the reward suite, gathered after a policy step.
struct RewardState {
  double base_vel_x = 0.0;
  double root_height = 0.0;
  double torso_pitch = 0.0;
  JointVector q{};
  JointVector action{};
  JointVector prev_action{};
  Command command;
  std::array<double, 2> upper_targets{};
  double waist_target = 0.0;
};

struct RewardBreakdown {
  Rewards rewards;
  double fat2 = 0.0;
  double beta_target = 0.0;
  double beta_actual = 0.0;
};

// Maps torso pitch to the ground-referenced tilt convention. The robot
// leans against the force, so a pull toward -x is countered with +x pitch.
double beta_from_pitch(double torso_pitch, int direction_sign);

RewardBreakdown compute_rewards(const RewardState& state,
                                const statics::BodyGeometry& geom,
                                const statics::HandForce& f,
                                const SimConfig& config);

// Procedural upper-body joint targets: a sum of random-phase sinusoids
// around the nominal shoulder/elbow angles, bounded by the joint limits.
struct UpperTargetParams {
  std::array<std::array<double, 4>, 2> amplitude{};
  std::array<std::array<double, 4>, 2> frequency{};
  std::array<std::array<double, 4>, 2> phase{};
};
UpperTargetParams make_upper_target_params(const UpperTargetConfig& config,
                                           std::uint64_t seed);
std::array<double, 2> upper_targets(const UpperTargetParams& params,
                                    const JointLayout& layout, double time);
std::array<double, 2> upper_targets(const UpperTargetConfig& config,
                                    const JointLayout& layout, int step,
                                    double policy_dt, std::uint64_t seed);

class EpisodeDoneError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Quasi-static planar humanoid. Each joint is a second-order servo driven by
// the PD torque and the quasi-static load of its distal subtree; balance is
// judged by the zero-moment point of the whole body.
class Env {
 public:
  explicit Env(SimConfig config);

  StepResult reset(std::uint64_t seed, int stage);
  StepResult step(std::span<const double> actions);

  // Replaces the sampled force profile of the current episode.
  void set_force_schedule(const ForceSchedule& schedule);
  // Replaces the sampled command of the current episode.
  void set_command(const Command& command);

  const SimConfig& config() const { return config_; }
  // Lever arms of the nominal pose used for tilt targets.
  const statics::BodyGeometry& effective_geometry() const { return geometry_; }
  const BodyPose& pose() const { return pose_; }
  const JointVector& q() const { return q_; }
  const JointVector& dq() const { return dq_; }
  const ForceSchedule& force_schedule() const { return force_; }
  statics::HandForce applied_force() const { return force_.at(t_); }
  int step_index() const { return t_; }
  int stage() const { return stage_; }
  bool done() const { return done_; }
  double last_zmp() const { return last_zmp_; }
  long long substep_count() const { return substep_count_; }
  double root_height_nominal() const { return nominal_root_height_; }

  Observation observation() const;
  PrivilegedObs privileged() const;
  // Desired joint angles for normalized actions, clamped to joint limits.
  JointVector desired_angles(std::span<const double> actions) const;
  // Quasi-static ZMP of the current pose under the given hand force.
  double zmp_of_pose(const statics::HandForce& f) const;

  // Full dynamic state for checkpointing.
  Json state_json() const;
  void load_state(const Json& j);

 private:
  void integrate_substep(const JointVector& q_des, const Vec2& hand_force);
  StepResult make_result(const RewardBreakdown& rb) const;

  SimConfig config_;
  statics::BodyGeometry geometry_;
  JointVector inertia_{};
  double nominal_root_height_ = 0.0;

  JointVector q_{};
  JointVector dq_{};
  JointVector prev_action_{};
  BodyPose pose_;
  Command command_;
  ForceSchedule force_;
  UpperTargetParams upper_params_;
  std::uint64_t episode_seed_ = 0;
  int stage_ = 1;
  int t_ = 0;
  bool done_ = true;
  Termination termination_ = Termination::kNone;
  int zmp_out_count_ = 0;
  double last_zmp_ = 0.0;
  long long substep_count_ = 0;
  RewardBreakdown last_rewards_;
};

// Accumulates one CSV row per policy step.
class TraceRecorder {
 public:
  void record(const Env& env, const StepResult& r);
  void write_csv(const std::string& path, const std::string& stamp) const;
  std::size_t size() const { return rows_.size(); }

 private:
  std::vector<std::vector<double>> rows_;
};

}  // namespace forcelab::sim

#endif  // FORCELAB_SIM_H_
