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

#include "forcelab/sim.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "forcelab/csv.h"
#include "forcelab/rng.h"

namespace forcelab::sim {
namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

double sample_normal(Rng& rng, double mean, double stddev) {
  return stddev > 0.0 ? rng.normal(mean, stddev) : mean;
}

double soft_limit_excess(const JointSpec& spec, double q, double margin) {
  return std::max(0.0, q - (spec.upper - margin)) +
         std::max(0.0, (spec.lower + margin) - q);
}

double action_rate(const JointVector& a, const JointVector& prev,
                   AgentSlice slice) {
  double acc = 0.0;
  for (int k = slice.offset; k < slice.offset + slice.size; ++k) {
    const double d = a[k] - prev[k];
    acc += d * d;
  }
  return acc;
}

double limit_penalty(const JointLayout& layout, const JointVector& q,
                     AgentSlice slice, double margin) {
  double acc = 0.0;
  for (int k = slice.offset; k < slice.offset + slice.size; ++k) {
    acc += soft_limit_excess(layout.joints[k], q[k], margin);
  }
  return acc;
}

Json joint_vector_json(const JointVector& v) {
  Json j = Json::array();
  for (double x : v) j.push_back(x);
  return j;
}

JointVector joint_vector_from(const Json& j) {
  JointVector v{};
  if (!j.is_array() || j.size() != kNumJoints) {
    throw std::invalid_argument("joint vector must have 6 entries");
  }
  for (int k = 0; k < kNumJoints; ++k) v[k] = j[k].get<double>();
  return v;
}

}  // namespace

std::string to_string(Termination t) {
  switch (t) {
    case Termination::kNone:
      return "none";
    case Termination::kZmpExit:
      return "zmp_exit";
    case Termination::kPitchLimit:
      return "pitch_limit";
    case Termination::kSlip:
      return "slip";
    case Termination::kTimeout:
      return "timeout";
  }
  return "unknown";
}

std::array<double, kObservationSize> Observation::to_vector() const {
  std::array<double, kObservationSize> v{};
  int i = 0;
  for (double x : q) v[i++] = x;
  for (double x : dq) v[i++] = kJointVelocityScale * x;
  v[i++] = kPitchRateScale * base_pitch_rate;
  v[i++] = gravity_projection[0];
  v[i++] = gravity_projection[1];
  for (double x : prev_action) v[i++] = x;
  v[i++] = command.v_lin_x;
  v[i++] = static_cast<double>(command.mode);
  v[i++] = kRootHeightScale * (command.root_height - nominal_root_height);
  v[i++] = upper_targets[0];
  v[i++] = upper_targets[1];
  return v;
}

std::array<double, kPrivilegedSize> PrivilegedObs::to_vector() const {
  return {base_lin_vel.x(),           base_lin_vel.y(),
          torso_pitch,                kForceScale * hand_force.x(),
          kForceScale * hand_force.y(), hand_height};
}

double ForceSchedule::magnitude_at(int step) const {
  if (step < onset_step) return 0.0;
  if (ramp_steps <= 0) return magnitude;
  const int into = step - onset_step;
  if (into >= ramp_steps) return magnitude;
  return magnitude * static_cast<double>(into) / ramp_steps;
}

statics::HandForce ForceSchedule::at(int step) const {
  return {magnitude_at(step), ground_angle, direction_sign};
}

void SimConfig::validate() const {
  layout.validate();
  geometry.validate();
  if (std::abs(layout.total_mass() - geometry.total_mass) > 1e-9) {
    throw std::invalid_argument(
        "link masses must sum to geometry.total_mass");
  }
  if (!(beta_lim > 0.0 && beta_lim < kHalfPi)) {
    throw std::invalid_argument("beta_lim must lie in (0, pi/2)");
  }
  if (!(fat2_sigma > 0.0)) throw std::invalid_argument("fat2_sigma must be > 0");
  if (substeps < 1) throw std::invalid_argument("substeps must be >= 1");
  if (!(substep_dt > 0.0)) throw std::invalid_argument("substep_dt must be > 0");
  if (!(action_scale > 0.0)) throw std::invalid_argument("action_scale must be > 0");
  if (!(reset_jitter >= 0.0)) throw std::invalid_argument("reset_jitter must be >= 0");
  if (!(pitch_limit > 0.0)) throw std::invalid_argument("pitch_limit must be > 0");
  if (zmp_exit_substeps < 0) {
    throw std::invalid_argument("zmp_exit_substeps must be >= 0");
  }
  if (max_episode_steps < 1) {
    throw std::invalid_argument("max_episode_steps must be >= 1");
  }
  if (!(command.locomote_probability >= 0.0 &&
        command.locomote_probability <= 1.0)) {
    throw std::invalid_argument("locomote_probability must lie in [0, 1]");
  }
  if (!(command.v_max >= 0.0 && command.v_max <= 0.6)) {
    throw std::invalid_argument("command v_max must lie in [0, 0.6]");
  }
  if (!(command.height_range >= 0.0 && command.height_range <= 0.2)) {
    throw std::invalid_argument("command height_range must lie in [0, 0.2]");
  }
  if (upper_targets.components < 1 || upper_targets.components > 4) {
    throw std::invalid_argument("upper_targets.components must be in [1, 4]");
  }
  if (!(upper_targets.amplitude >= 0.0)) {
    throw std::invalid_argument("upper_targets.amplitude must be >= 0");
  }
  if (!(upper_targets.freq_min > 0.0 &&
        upper_targets.freq_max >= upper_targets.freq_min)) {
    throw std::invalid_argument("upper target frequencies must be ordered and > 0");
  }
  for (const auto* d : {&force.stage1, &force.stage2}) {
    if (!(d->base_magnitude >= 0.0 && d->magnitude_std >= 0.0)) {
      throw std::invalid_argument("force distribution must be non-negative");
    }
  }
  if (!(force.angle_std >= 0.0 && force.angle_max >= 0.0 &&
        force.angle_max < kHalfPi)) {
    throw std::invalid_argument("force angle parameters out of range");
  }
  if (force.onset_max_steps < 0 || force.ramp_steps < 0) {
    throw std::invalid_argument("force onset/ramp steps must be >= 0");
  }
  const double sigmas[] = {reward.velocity_sigma, reward.height_sigma,
                           reward.waist_sigma, reward.upper_sigma};
  for (double s : sigmas) {
    if (!(s > 0.0)) throw std::invalid_argument("reward sigmas must be > 0");
  }
}

double pd_torque(double q_des, double q, double dq, double kp, double kd,
                 double limit) {
  const double tau = kp * (q_des - q) - kd * dq;
  return std::clamp(tau, -limit, limit);
}

double beta_from_pitch(double torso_pitch, int direction_sign) {
  return kHalfPi + direction_sign * torso_pitch;
}

RewardBreakdown compute_rewards(const RewardState& s,
                                const statics::BodyGeometry& geom,
                                const statics::HandForce& f,
                                const SimConfig& config) {
  const RewardConfig& w = config.reward;
  RewardBreakdown out;
  out.beta_target = statics::expected_tilt(geom, f, config.beta_lim).beta;
  out.beta_actual = beta_from_pitch(s.torso_pitch, f.direction_sign);
  out.fat2 = statics::fat2_reward(out.beta_target, out.beta_actual,
                                  config.fat2_sigma);
  const double fat2 = w.fat2_enabled ? out.fat2 : 0.0;

  const double v_cmd = s.command.mode == 1 ? s.command.v_lin_x : 0.0;
  const double dv = s.base_vel_x - v_cmd;
  const double dh = s.root_height - s.command.root_height;
  const double dw = s.q[kWaist] - s.waist_target;
  const double du0 = s.q[kShoulder] - s.upper_targets[0];
  const double du1 = s.q[kElbow] - s.upper_targets[1];
  const double m = w.joint_limit_margin;

  out.rewards.lower = w.velocity * std::exp(-dv * dv / w.velocity_sigma) +
                      w.fat2_lower * fat2 +
                      w.height * std::exp(-dh * dh / w.height_sigma) +
                      w.survival -
                      w.action_rate * action_rate(s.action, s.prev_action, kLowerSlice) -
                      w.joint_limit * limit_penalty(config.layout, s.q, kLowerSlice, m);
  out.rewards.waist = w.fat2_waist * fat2 +
                      w.waist_posture * std::exp(-dw * dw / w.waist_sigma) -
                      w.action_rate * action_rate(s.action, s.prev_action, kWaistSlice) -
                      w.joint_limit * limit_penalty(config.layout, s.q, kWaistSlice, m);
  out.rewards.upper =
      w.upper_tracking * std::exp(-(du0 * du0 + du1 * du1) / w.upper_sigma) -
      w.action_rate * action_rate(s.action, s.prev_action, kUpperSlice) -
      w.joint_limit * limit_penalty(config.layout, s.q, kUpperSlice, m);
  return out;
}

UpperTargetParams make_upper_target_params(const UpperTargetConfig& config,
                                           std::uint64_t seed) {
  UpperTargetParams p;
  Rng rng(seed);
  for (int joint = 0; joint < 2; ++joint) {
    std::array<double, 4> weight{};
    double total = 0.0;
    for (int k = 0; k < config.components; ++k) {
      weight[k] = rng.uniform(0.2, 1.0);
      total += weight[k];
      p.frequency[joint][k] = rng.uniform(config.freq_min, config.freq_max);
      p.phase[joint][k] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
    for (int k = 0; k < config.components; ++k) {
      p.amplitude[joint][k] = config.amplitude * weight[k] / total;
    }
  }
  return p;
}

std::array<double, 2> upper_targets(const UpperTargetParams& params,
                                    const JointLayout& layout, double time) {
  std::array<double, 2> out{};
  const int joints[2] = {kShoulder, kElbow};
  for (int i = 0; i < 2; ++i) {
    double acc = layout.joints[joints[i]].nominal;
    for (int k = 0; k < 4; ++k) {
      if (params.amplitude[i][k] == 0.0) continue;
      acc += params.amplitude[i][k] *
             std::sin(2.0 * std::numbers::pi * params.frequency[i][k] * time +
                      params.phase[i][k]);
    }
    out[i] = layout.clamp(joints[i], acc);
  }
  return out;
}

std::array<double, 2> upper_targets(const UpperTargetConfig& config,
                                    const JointLayout& layout, int step,
                                    double policy_dt, std::uint64_t seed) {
  return upper_targets(make_upper_target_params(config, seed), layout,
                       step * policy_dt);
}

Env::Env(SimConfig config) : config_(std::move(config)) {
  config_.validate();
  const BodyPose nominal = forward_kinematics(config_.layout, config_.layout.nominal());
  geometry_ = lumped_geometry(config_.layout, nominal, config_.geometry);
  inertia_ = effective_inertia(config_.layout, nominal);
  nominal_root_height_ = nominal.pelvis().y();
  pose_ = nominal;
  q_ = config_.layout.nominal();
}

StepResult Env::reset(std::uint64_t seed, int stage) {
  if (stage != 1 && stage != 2) throw std::invalid_argument("stage must be 1 or 2");
  episode_seed_ = seed;
  stage_ = stage;
  Rng rng(seed);
  for (int j = 0; j < kNumJoints; ++j) {
    const double jitter = config_.reset_jitter > 0.0
                              ? rng.uniform(-config_.reset_jitter, config_.reset_jitter)
                              : 0.0;
    q_[j] = config_.layout.clamp(j, config_.layout.joints[j].nominal + jitter);
  }
  dq_.fill(0.0);
  prev_action_.fill(0.0);

  const CommandConfig& cc = config_.command;
  command_.mode = rng.uniform() < cc.locomote_probability ? 1 : 0;
  command_.v_lin_x = command_.mode == 1 ? rng.uniform(-cc.v_max, cc.v_max) : 0.0;
  command_.root_height =
      nominal_root_height_ - (cc.height_range > 0.0 ? rng.uniform(0.0, cc.height_range) : 0.0);

  const ForceConfig& fc = config_.force;
  const ForceDistribution& dist = stage == 1 ? fc.stage1 : fc.stage2;
  double magnitude = std::max(0.0, sample_normal(rng, dist.base_magnitude, dist.magnitude_std));
  if (dist.cap > 0.0) magnitude = std::min(magnitude, dist.cap);
  force_.magnitude = magnitude;
  force_.ground_angle =
      std::clamp(sample_normal(rng, fc.angle_mean, fc.angle_std), 0.0, fc.angle_max);
  force_.direction_sign = rng.uniform() < 0.5 ? -1 : 1;
  force_.onset_step = static_cast<int>(
      std::floor(rng.uniform(0.0, static_cast<double>(fc.onset_max_steps) + 1.0)));
  force_.onset_step = std::min(force_.onset_step, fc.onset_max_steps);
  force_.ramp_steps = fc.ramp_steps;

  upper_params_ = make_upper_target_params(config_.upper_targets, derive_seed(seed, 0x5550));

  t_ = 0;
  done_ = false;
  termination_ = Termination::kNone;
  zmp_out_count_ = 0;
  pose_ = forward_kinematics(config_.layout, q_);
  last_zmp_ = zmp_of_pose(applied_force());
  last_rewards_ = RewardBreakdown{};
  return make_result(last_rewards_);
}

void Env::set_force_schedule(const ForceSchedule& schedule) {
  schedule.at(0).validate();
  force_ = schedule;
  last_zmp_ = zmp_of_pose(applied_force());
}

void Env::set_command(const Command& command) { command_ = command; }

JointVector Env::desired_angles(std::span<const double> actions) const {
  JointVector q_des{};
  for (int j = 0; j < kNumJoints; ++j) {
    const double a = std::clamp(actions[j], -1.0, 1.0);
    q_des[j] = config_.layout.clamp(
        j, config_.layout.joints[j].nominal + config_.action_scale * a);
  }
  return q_des;
}

double Env::zmp_of_pose(const statics::HandForce& f) const {
  const double g = config_.geometry.gravity_accel;
  double weight = 0.0;
  double moment = 0.0;
  for (int i = 0; i < kNumJoints; ++i) {
    const double w = config_.layout.joints[i].link_mass * g;
    weight += w;
    moment += w * pose_.link_com[i].x();
  }
  const double fx = f.horizontal();
  const double fz = f.vertical();
  moment += pose_.hand.y() * fx - pose_.hand.x() * fz;
  return moment / (weight - fz);
}

void Env::integrate_substep(const JointVector& q_des, const Vec2& hand_force) {
  const JointVector load = load_torques(config_.layout, pose_,
                                        config_.geometry.gravity_accel, hand_force);
  const double dt = config_.substep_dt;
  for (int j = 0; j < kNumJoints; ++j) {
    const JointSpec& s = config_.layout.joints[j];
    const double tau = pd_torque(q_des[j], q_[j], dq_[j], s.kp, s.kd, s.torque_limit);
    dq_[j] += dt * (tau + load[j]) / inertia_[j];
    q_[j] += dt * dq_[j];
    if (q_[j] < s.lower || q_[j] > s.upper) {
      q_[j] = std::clamp(q_[j], s.lower, s.upper);
      dq_[j] = 0.0;
    }
  }
  pose_ = forward_kinematics(config_.layout, q_);
  ++substep_count_;
}

StepResult Env::step(std::span<const double> actions) {
  if (done_) throw EpisodeDoneError("step() called on a finished episode");
  if (actions.size() != static_cast<std::size_t>(kNumJoints)) {
    throw std::invalid_argument("expected 6 actions [lower|waist|upper]");
  }
  JointVector a{};
  for (int j = 0; j < kNumJoints; ++j) {
    if (!std::isfinite(actions[j])) throw std::invalid_argument("non-finite action");
    a[j] = std::clamp(actions[j], -1.0, 1.0);
  }
  const JointVector q_des = desired_angles(a);
  const statics::HandForce f = applied_force();
  const Vec2 hand_force(f.horizontal(), f.vertical());
  const bool slip = statics::solve_support_reactions(config_.geometry, f).slip;

  bool zmp_exit = false;
  for (int s = 0; s < config_.substeps; ++s) {
    integrate_substep(q_des, hand_force);
    last_zmp_ = zmp_of_pose(f);
    if (config_.geometry.inside_support(last_zmp_)) {
      zmp_out_count_ = 0;
    } else if (++zmp_out_count_ > config_.zmp_exit_substeps) {
      zmp_exit = true;
    }
  }
  if (!config_.geometry.inside_support(last_zmp_)) zmp_exit = true;

  RewardState rs;
  const Vec2 v = point_velocity(pose_, dq_, pose_.pelvis(), kKnee);
  rs.base_vel_x = v.x();
  rs.root_height = pose_.pelvis().y();
  rs.torso_pitch = pose_.torso_pitch();
  rs.q = q_;
  rs.action = a;
  rs.prev_action = prev_action_;
  rs.command = command_;
  rs.upper_targets = upper_targets(upper_params_, config_.layout, (t_ + 1) * config_.policy_dt());
  rs.waist_target = config_.layout.joints[kWaist].nominal;
  last_rewards_ = compute_rewards(rs, geometry_, f, config_);

  prev_action_ = a;
  ++t_;
  if (slip) {
    termination_ = Termination::kSlip;
  } else if (zmp_exit) {
    termination_ = Termination::kZmpExit;
  } else if (std::abs(pose_.torso_pitch()) > config_.pitch_limit) {
    termination_ = Termination::kPitchLimit;
  } else if (t_ >= config_.max_episode_steps) {
    termination_ = Termination::kTimeout;
  }
  done_ = termination_ != Termination::kNone;
  StepResult r = make_result(last_rewards_);
  r.force_magnitude = f.magnitude;
  return r;
}

Observation Env::observation() const {
  Observation o;
  o.q = q_;
  o.dq = dq_;
  o.base_pitch_rate = dq_[kAnkle] + dq_[kKnee] + dq_[kHip] + dq_[kWaist];
  o.gravity_projection = {std::sin(pose_.torso_pitch()), std::cos(pose_.torso_pitch())};
  o.prev_action = prev_action_;
  o.command = command_;
  o.upper_targets = upper_targets(upper_params_, config_.layout, t_ * config_.policy_dt());
  o.nominal_root_height = nominal_root_height_;
  return o;
}

PrivilegedObs Env::privileged() const {
  PrivilegedObs p;
  p.base_lin_vel = point_velocity(pose_, dq_, pose_.pelvis(), kKnee);
  p.torso_pitch = pose_.torso_pitch();
  const statics::HandForce f = applied_force();
  p.hand_force = Vec2(f.horizontal(), f.vertical());
  p.hand_height = pose_.hand.y();
  return p;
}

StepResult Env::make_result(const RewardBreakdown& rb) const {
  StepResult r;
  r.observation = observation();
  r.privileged = privileged();
  r.rewards = rb.rewards;
  r.done = done_;
  r.termination = termination_;
  r.zmp_x = last_zmp_;
  r.force_magnitude = applied_force().magnitude;
  r.torso_pitch = pose_.torso_pitch();
  r.beta_actual = beta_from_pitch(pose_.torso_pitch(), force_.direction_sign);
  r.beta_target = rb.beta_target;
  return r;
}

Json Env::state_json() const {
  Json j;
  j["episode_seed"] = episode_seed_;
  j["stage"] = stage_;
  j["t"] = t_;
  j["done"] = done_;
  j["termination"] = static_cast<int>(termination_);
  j["q"] = joint_vector_json(q_);
  j["dq"] = joint_vector_json(dq_);
  j["prev_action"] = joint_vector_json(prev_action_);
  j["command"] = {{"v_lin_x", command_.v_lin_x},
                  {"mode", command_.mode},
                  {"root_height", command_.root_height}};
  j["force"] = {{"magnitude", force_.magnitude},
                {"ground_angle", force_.ground_angle},
                {"direction_sign", force_.direction_sign},
                {"onset_step", force_.onset_step},
                {"ramp_steps", force_.ramp_steps}};
  j["zmp_out_count"] = zmp_out_count_;
  j["last_zmp"] = last_zmp_;
  j["substep_count"] = substep_count_;
  return j;
}

void Env::load_state(const Json& j) {
  episode_seed_ = j.at("episode_seed").get<std::uint64_t>();
  stage_ = j.at("stage").get<int>();
  t_ = j.at("t").get<int>();
  done_ = j.at("done").get<bool>();
  termination_ = static_cast<Termination>(j.at("termination").get<int>());
  q_ = joint_vector_from(j.at("q"));
  dq_ = joint_vector_from(j.at("dq"));
  prev_action_ = joint_vector_from(j.at("prev_action"));
  const Json& c = j.at("command");
  command_.v_lin_x = c.at("v_lin_x").get<double>();
  command_.mode = c.at("mode").get<int>();
  command_.root_height = c.at("root_height").get<double>();
  const Json& f = j.at("force");
  force_.magnitude = f.at("magnitude").get<double>();
  force_.ground_angle = f.at("ground_angle").get<double>();
  force_.direction_sign = f.at("direction_sign").get<int>();
  force_.onset_step = f.at("onset_step").get<int>();
  force_.ramp_steps = f.at("ramp_steps").get<int>();
  zmp_out_count_ = j.at("zmp_out_count").get<int>();
  last_zmp_ = j.at("last_zmp").get<double>();
  substep_count_ = j.at("substep_count").get<long long>();
  upper_params_ = make_upper_target_params(config_.upper_targets,
                                           derive_seed(episode_seed_, 0x5550));
  pose_ = forward_kinematics(config_.layout, q_);
}

void TraceRecorder::record(const Env& env, const StepResult& r) {
  std::vector<double> row;
  row.push_back(env.step_index());
  for (double q : env.q()) row.push_back(q);
  row.push_back(r.torso_pitch);
  row.push_back(r.force_magnitude);
  row.push_back(r.zmp_x);
  row.push_back(r.rewards.lower);
  row.push_back(r.rewards.waist);
  row.push_back(r.rewards.upper);
  row.push_back(r.done ? 1.0 : 0.0);
  rows_.push_back(std::move(row));
}

void TraceRecorder::write_csv(const std::string& path, const std::string& stamp) const {
  CsvTable table;
  table.header = {"t", "q_ankle", "q_knee", "q_hip", "q_waist", "q_shoulder",
                  "q_elbow", "torso_pitch", "force_N", "zmp_x", "r_lower",
                  "r_waist", "r_upper", "done"};
  for (const auto& row : rows_) {
    std::vector<std::string> cells;
    for (std::size_t i = 0; i < row.size(); ++i) {
      cells.push_back(i == 0 || i + 1 == row.size()
                          ? std::to_string(static_cast<long long>(row[i]))
                          : format_double(row[i]));
    }
    table.add_row(std::move(cells));
  }
  forcelab::write_csv(path, stamp, table);
}

}  // namespace forcelab::sim
