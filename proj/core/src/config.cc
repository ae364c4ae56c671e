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

#include "forcelab/config.h"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "forcelab/quasistatics.h"

namespace forcelab {
namespace {

Json distribution_json(const sim::ForceDistribution& d) {
  return {{"base_magnitude", d.base_magnitude},
          {"magnitude_std", d.magnitude_std},
          {"cap", d.cap}};
}

sim::ForceDistribution distribution_from(const Json& j) {
  return {j.at("base_magnitude").get<double>(), j.at("magnitude_std").get<double>(),
          j.at("cap").get<double>()};
}

Json joint_json(const sim::JointSpec& s) {
  return {{"name", s.name},       {"lower", s.lower},
          {"upper", s.upper},     {"torque_limit", s.torque_limit},
          {"link_length", s.link_length}, {"link_mass", s.link_mass},
          {"kp", s.kp},           {"kd", s.kd},
          {"nominal", s.nominal}};
}

sim::JointSpec joint_from(const Json& j) {
  sim::JointSpec s;
  s.name = j.at("name").get<std::string>();
  s.lower = j.at("lower").get<double>();
  s.upper = j.at("upper").get<double>();
  s.torque_limit = j.at("torque_limit").get<double>();
  s.link_length = j.at("link_length").get<double>();
  s.link_mass = j.at("link_mass").get<double>();
  s.kp = j.at("kp").get<double>();
  s.kd = j.at("kd").get<double>();
  s.nominal = j.at("nominal").get<double>();
  return s;
}

bool same_kind(const Json& slot, const Json& value) {
  if (slot.is_number_float()) return value.is_number();
  if (slot.is_number_integer()) return value.is_number_integer();
  if (slot.is_boolean()) return value.is_boolean();
  if (slot.is_string()) return value.is_string();
  if (slot.is_array()) return value.is_array();
  if (slot.is_object()) return value.is_object();
  return true;
}

void merge_into(Json& base, const Json& patch, const std::string& prefix) {
  if (!patch.is_object()) {
    throw ConfigError(kExitParseError,
                      "expected an object at " + (prefix.empty() ? "top level" : prefix));
  }
  for (const auto& [key, value] : patch.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!base.contains(key)) throw ConfigError(kExitUnknownKey, "unknown config key: " + path);
    Json& slot = base[key];
    if (!same_kind(slot, value)) {
      throw ConfigError(kExitParseError, "config key " + path + " has type " +
                                             value.type_name() + ", expected " +
                                             slot.type_name());
    }
    if (slot.is_object()) {
      merge_into(slot, value, path);
    } else {
      slot = value;
    }
  }
}

void collect_leaves(const Json& j, const std::string& prefix, std::vector<std::string>& out) {
  for (const auto& [key, value] : j.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (value.is_object()) {
      collect_leaves(value, path, out);
    } else {
      out.push_back(path);
    }
  }
}

std::string resolve_key(const Json& doc, const std::string& key) {
  std::vector<std::string> leaves;
  collect_leaves(doc, "", leaves);
  std::vector<std::string> hits;
  for (const std::string& l : leaves) {
    if (l == key) return l;
    if (l.size() > key.size() && l.ends_with(key) && l[l.size() - key.size() - 1] == '.') {
      hits.push_back(l);
    }
  }
  if (hits.empty()) throw ConfigError(kExitUnknownKey, "unknown config key: " + key);
  if (hits.size() > 1) {
    std::string msg = "ambiguous config key " + key + "; use one of:";
    for (const std::string& h : hits) msg += " " + h;
    throw ConfigError(kExitUnknownKey, msg);
  }
  return hits.front();
}

Json::json_pointer pointer_of(const std::string& dotted) {
  std::string p;
  std::stringstream ss(dotted);
  std::string part;
  while (std::getline(ss, part, '.')) p += "/" + part;
  return Json::json_pointer(p);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(kExitMissingFile, "config file not found: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool blank(const std::string& s) {
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

void EvalConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("eval config: " + what);
  };
  require(peak.ramp_rate > 0.0, "ramp_rate must be > 0");
  require(peak.hold_seconds >= 0.0, "hold_seconds must be >= 0");
  require(peak.settle_steps >= 0, "settle_steps must be >= 0");
  require(peak.coarse_step > 0.0 && peak.resolution > 0.0,
          "coarse_step and resolution must be > 0");
  require(peak.max_force > 0.0, "max_force must be > 0");
  require(sweep.settle_steps >= 0 && sweep.ramp_steps >= 0 && sweep.hold_steps >= 2,
          "sweep step counts out of range");
  require(std::is_sorted(sweep_forces.begin(), sweep_forces.end()),
          "sweep forces must be ascending");
  for (double f : sweep_forces) require(f >= 0.0, "sweep forces must be >= 0");
  require(!directions.empty(), "directions must not be empty");
  for (const std::string& d : directions) eval::direction_sign(d);
  eval::direction_sign(sweep.direction);
  require(!seeds.empty(), "seeds must not be empty");
  for (const std::string& v : variants) eval::variant_from(v);
  require(trace_steps >= 0, "trace_steps must be >= 0");
}

void RunConfig::validate() const {
  sim.validate();
  train.validate();
  eval.validate();
}

Json config_to_json(const RunConfig& c) {
  Json j;
  j["seed"] = c.seed;
  const statics::BodyGeometry& g = c.sim.geometry;
  j["geometry"] = {{"total_mass", g.total_mass},
                   {"gravity_accel", g.gravity_accel},
                   {"com_distance", g.com_distance},
                   {"ee_distance", g.ee_distance},
                   {"ee_offset_angle", g.ee_offset_angle},
                   {"support_min", g.support_min},
                   {"support_max", g.support_max},
                   {"friction_coeff", g.friction_coeff}};
  const sim::SimConfig& s = c.sim;
  Json sj;
  sj["beta_lim"] = s.beta_lim;
  sj["fat2_sigma"] = s.fat2_sigma;
  sj["substeps"] = s.substeps;
  sj["substep_dt"] = s.substep_dt;
  sj["action_scale"] = s.action_scale;
  sj["reset_jitter"] = s.reset_jitter;
  sj["pitch_limit"] = s.pitch_limit;
  sj["zmp_exit_substeps"] = s.zmp_exit_substeps;
  sj["max_episode_steps"] = s.max_episode_steps;
  sj["command"] = {{"locomote_probability", s.command.locomote_probability},
                   {"v_max", s.command.v_max},
                   {"height_range", s.command.height_range}};
  sj["upper_targets"] = {{"amplitude", s.upper_targets.amplitude},
                         {"components", s.upper_targets.components},
                         {"freq_min", s.upper_targets.freq_min},
                         {"freq_max", s.upper_targets.freq_max}};
  sj["force"] = {{"stage1", distribution_json(s.force.stage1)},
                 {"stage2", distribution_json(s.force.stage2)},
                 {"angle_mean", s.force.angle_mean},
                 {"angle_std", s.force.angle_std},
                 {"angle_max", s.force.angle_max},
                 {"onset_max_steps", s.force.onset_max_steps},
                 {"ramp_steps", s.force.ramp_steps}};
  const sim::RewardConfig& r = s.reward;
  sj["reward"] = {{"fat2_enabled", r.fat2_enabled},
                  {"fat2_lower", r.fat2_lower},
                  {"fat2_waist", r.fat2_waist},
                  {"velocity", r.velocity},
                  {"velocity_sigma", r.velocity_sigma},
                  {"height", r.height},
                  {"height_sigma", r.height_sigma},
                  {"survival", r.survival},
                  {"waist_posture", r.waist_posture},
                  {"waist_sigma", r.waist_sigma},
                  {"upper_tracking", r.upper_tracking},
                  {"upper_sigma", r.upper_sigma},
                  {"action_rate", r.action_rate},
                  {"joint_limit", r.joint_limit},
                  {"joint_limit_margin", r.joint_limit_margin}};
  Json joints = Json::array();
  for (const sim::JointSpec& js : s.layout.joints) joints.push_back(joint_json(js));
  sj["joints"] = std::move(joints);
  j["sim"] = std::move(sj);

  const train::TrainConfig& t = c.train;
  j["train"] = {{"iterations", t.iterations},
                {"learning_rate", t.learning_rate},
                {"gamma", t.gamma},
                {"clip_eps", t.clip_eps},
                {"entropy_coef", t.entropy_coef},
                {"value_coef", t.value_coef},
                {"gae_lambda", t.gae_lambda},
                {"reg_coef", t.reg_coef},
                {"regularizer", t.regularizer},
                {"epochs", t.epochs},
                {"num_minibatches", t.num_minibatches},
                {"rollout_length", t.rollout_length},
                {"num_envs", t.num_envs},
                {"curriculum_switch", t.curriculum_switch},
                {"hidden_layers", t.hidden_layers},
                {"architecture", t.architecture},
                {"init_log_std", t.init_log_std},
                {"max_grad_norm", t.max_grad_norm},
                {"checkpoint_every", t.checkpoint_every}};

  const EvalConfig& e = c.eval;
  j["eval"] = {{"ramp_rate", e.peak.ramp_rate},
               {"hold_seconds", e.peak.hold_seconds},
               {"settle_steps", e.peak.settle_steps},
               {"coarse_step", e.peak.coarse_step},
               {"resolution", e.peak.resolution},
               {"max_force", e.peak.max_force},
               {"ground_angle", e.peak.ground_angle},
               {"directions", e.directions},
               {"seeds", e.seeds},
               {"variants", e.variants},
               {"trace_steps", e.trace_steps},
               {"sweep",
                {{"direction", e.sweep.direction},
                 {"ground_angle", e.sweep.ground_angle},
                 {"settle_steps", e.sweep.settle_steps},
                 {"ramp_steps", e.sweep.ramp_steps},
                 {"hold_steps", e.sweep.hold_steps},
                 {"forces", e.sweep_forces}}}};
  j["run"] = {{"out_dir", c.out_dir}, {"checkpoint", c.checkpoint}, {"quiet", c.quiet}};
  return j;
}

RunConfig config_from_json(const Json& j) {
  try {
    RunConfig c;
    c.seed = j.at("seed").get<std::uint64_t>();
    const Json& g = j.at("geometry");
    statics::BodyGeometry& geom = c.sim.geometry;
    geom.total_mass = g.at("total_mass").get<double>();
    geom.gravity_accel = g.at("gravity_accel").get<double>();
    geom.com_distance = g.at("com_distance").get<double>();
    geom.ee_distance = g.at("ee_distance").get<double>();
    geom.ee_offset_angle = g.at("ee_offset_angle").get<double>();
    geom.support_min = g.at("support_min").get<double>();
    geom.support_max = g.at("support_max").get<double>();
    geom.friction_coeff = g.at("friction_coeff").get<double>();

    const Json& sj = j.at("sim");
    sim::SimConfig& s = c.sim;
    s.beta_lim = sj.at("beta_lim").get<double>();
    s.fat2_sigma = sj.at("fat2_sigma").get<double>();
    s.substeps = sj.at("substeps").get<int>();
    s.substep_dt = sj.at("substep_dt").get<double>();
    s.action_scale = sj.at("action_scale").get<double>();
    s.reset_jitter = sj.at("reset_jitter").get<double>();
    s.pitch_limit = sj.at("pitch_limit").get<double>();
    s.zmp_exit_substeps = sj.at("zmp_exit_substeps").get<int>();
    s.max_episode_steps = sj.at("max_episode_steps").get<int>();
    const Json& cj = sj.at("command");
    s.command.locomote_probability = cj.at("locomote_probability").get<double>();
    s.command.v_max = cj.at("v_max").get<double>();
    s.command.height_range = cj.at("height_range").get<double>();
    const Json& uj = sj.at("upper_targets");
    s.upper_targets.amplitude = uj.at("amplitude").get<double>();
    s.upper_targets.components = uj.at("components").get<int>();
    s.upper_targets.freq_min = uj.at("freq_min").get<double>();
    s.upper_targets.freq_max = uj.at("freq_max").get<double>();
    const Json& fj = sj.at("force");
    s.force.stage1 = distribution_from(fj.at("stage1"));
    s.force.stage2 = distribution_from(fj.at("stage2"));
    s.force.angle_mean = fj.at("angle_mean").get<double>();
    s.force.angle_std = fj.at("angle_std").get<double>();
    s.force.angle_max = fj.at("angle_max").get<double>();
    s.force.onset_max_steps = fj.at("onset_max_steps").get<int>();
    s.force.ramp_steps = fj.at("ramp_steps").get<int>();
    const Json& rj = sj.at("reward");
    sim::RewardConfig& r = s.reward;
    r.fat2_enabled = rj.at("fat2_enabled").get<bool>();
    r.fat2_lower = rj.at("fat2_lower").get<double>();
    r.fat2_waist = rj.at("fat2_waist").get<double>();
    r.velocity = rj.at("velocity").get<double>();
    r.velocity_sigma = rj.at("velocity_sigma").get<double>();
    r.height = rj.at("height").get<double>();
    r.height_sigma = rj.at("height_sigma").get<double>();
    r.survival = rj.at("survival").get<double>();
    r.waist_posture = rj.at("waist_posture").get<double>();
    r.waist_sigma = rj.at("waist_sigma").get<double>();
    r.upper_tracking = rj.at("upper_tracking").get<double>();
    r.upper_sigma = rj.at("upper_sigma").get<double>();
    r.action_rate = rj.at("action_rate").get<double>();
    r.joint_limit = rj.at("joint_limit").get<double>();
    r.joint_limit_margin = rj.at("joint_limit_margin").get<double>();
    const Json& joints = sj.at("joints");
    if (!joints.is_array() || joints.size() != static_cast<std::size_t>(sim::kNumJoints)) {
      throw ConfigError(kExitParseError, "sim.joints must list exactly 6 joints");
    }
    for (int i = 0; i < sim::kNumJoints; ++i) s.layout.joints[i] = joint_from(joints[i]);

    const Json& tj = j.at("train");
    train::TrainConfig& t = c.train;
    t.iterations = tj.at("iterations").get<int>();
    t.learning_rate = tj.at("learning_rate").get<double>();
    t.gamma = tj.at("gamma").get<double>();
    t.clip_eps = tj.at("clip_eps").get<double>();
    t.entropy_coef = tj.at("entropy_coef").get<double>();
    t.value_coef = tj.at("value_coef").get<double>();
    t.gae_lambda = tj.at("gae_lambda").get<double>();
    t.reg_coef = tj.at("reg_coef").get<double>();
    t.regularizer = tj.at("regularizer").get<std::string>();
    t.epochs = tj.at("epochs").get<int>();
    t.num_minibatches = tj.at("num_minibatches").get<int>();
    t.rollout_length = tj.at("rollout_length").get<int>();
    t.num_envs = tj.at("num_envs").get<int>();
    t.curriculum_switch = tj.at("curriculum_switch").get<int>();
    t.hidden_layers = tj.at("hidden_layers").get<std::vector<int>>();
    t.architecture = tj.at("architecture").get<std::string>();
    t.init_log_std = tj.at("init_log_std").get<double>();
    t.max_grad_norm = tj.at("max_grad_norm").get<double>();
    t.checkpoint_every = tj.at("checkpoint_every").get<int>();

    const Json& ej = j.at("eval");
    EvalConfig& e = c.eval;
    e.peak.ramp_rate = ej.at("ramp_rate").get<double>();
    e.peak.hold_seconds = ej.at("hold_seconds").get<double>();
    e.peak.settle_steps = ej.at("settle_steps").get<int>();
    e.peak.coarse_step = ej.at("coarse_step").get<double>();
    e.peak.resolution = ej.at("resolution").get<double>();
    e.peak.max_force = ej.at("max_force").get<double>();
    e.peak.ground_angle = ej.at("ground_angle").get<double>();
    e.directions = ej.at("directions").get<std::vector<std::string>>();
    e.seeds = ej.at("seeds").get<std::vector<std::uint64_t>>();
    e.variants = ej.at("variants").get<std::vector<std::string>>();
    e.trace_steps = ej.at("trace_steps").get<int>();
    const Json& wj = ej.at("sweep");
    e.sweep.direction = wj.at("direction").get<std::string>();
    e.sweep.ground_angle = wj.at("ground_angle").get<double>();
    e.sweep.settle_steps = wj.at("settle_steps").get<int>();
    e.sweep.ramp_steps = wj.at("ramp_steps").get<int>();
    e.sweep.hold_steps = wj.at("hold_steps").get<int>();
    e.sweep_forces = wj.at("forces").get<std::vector<double>>();

    const Json& run = j.at("run");
    c.out_dir = run.at("out_dir").get<std::string>();
    c.checkpoint = run.at("checkpoint").get<std::string>();
    c.quiet = run.at("quiet").get<bool>();
    return c;
  } catch (const Json::exception& e) {
    throw ConfigError(kExitParseError, std::string("config type error: ") + e.what());
  }
}

void apply_override(Json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError(kExitParseError, "override must look like key=value: " + assignment);
  }
  const std::string key = resolve_key(doc, assignment.substr(0, eq));
  const std::string text = assignment.substr(eq + 1);
  Json& slot = doc[pointer_of(key)];
  Json value;
  if (slot.is_string()) {
    value = text;
  } else {
    try {
      value = Json::parse(text);
    } catch (const Json::exception&) {
      throw ConfigError(kExitParseError, "cannot parse value for " + key + ": " + text);
    }
  }
  if (!same_kind(slot, value)) {
    throw ConfigError(kExitParseError, "override " + key + " has type " + value.type_name() +
                                           ", expected " + slot.type_name());
  }
  slot = value;
}

RunConfig parse_config(const std::string& path, const std::vector<std::string>& overrides) {
  Json doc = config_to_json(RunConfig{});
  if (!path.empty()) {
    const std::string text = read_file(path);
    if (!blank(text)) {
      Json file;
      try {
        file = Json::parse(text);
      } catch (const Json::exception& e) {
        throw ConfigError(kExitParseError, "cannot parse " + path + ": " + e.what());
      }
      merge_into(doc, file, "");
    }
  }
  for (const std::string& o : overrides) apply_override(doc, o);
  RunConfig c = config_from_json(doc);
  try {
    c.validate();
  } catch (const std::exception& e) {
    throw ConfigError(kExitInvariant, std::string("invalid configuration: ") + e.what());
  }
  return c;
}

std::string config_hash(const RunConfig& config) {
  Json j = config_to_json(config);
  j.erase("run");
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace forcelab
