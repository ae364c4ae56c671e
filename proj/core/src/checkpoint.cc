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

#include "forcelab/checkpoint.h"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace forcelab {
namespace {

constexpr const char* kFormatName = "forcelab.checkpoint";

Json vector_json(const Eigen::VectorXd& v) {
  return Json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from(const Json& j, std::size_t expected, const std::string& what) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != expected) {
    throw CheckpointMismatchError(what + ": expected " + std::to_string(expected) +
                                  " values, found " + std::to_string(v.size()));
  }
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Json adam_json(const nn::AdamState& s) {
  return {{"step", s.step}, {"m", vector_json(s.m)}, {"v", vector_json(s.v)}};
}

nn::AdamState adam_from(const Json& j, std::size_t n, const std::string& what) {
  nn::AdamState s;
  s.step = j.at("step").get<long long>();
  s.m = vector_from(j.at("m"), n, what + ".m");
  s.v = vector_from(j.at("v"), n, what + ".v");
  return s;
}

std::size_t param_count(const std::vector<int>& widths) {
  std::size_t n = 0;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    n += static_cast<std::size_t>(widths[i] + 1) * static_cast<std::size_t>(widths[i + 1]);
  }
  return n;
}

nn::Mlp mlp_from(const std::vector<int>& widths, const Json& params, const std::string& what) {
  if (widths.size() < 2) throw CheckpointMismatchError(what + ": fewer than two layer widths");
  for (int w : widths) {
    if (w < 1) throw CheckpointMismatchError(what + ": non-positive layer width");
  }
  nn::Mlp net = nn::Mlp::zeros(widths);
  net.set_params(vector_from(params, param_count(widths), what + ".params"));
  return net;
}

}  // namespace

Json bundle_to_json(const train::PolicyBundle& bundle) {
  Json j;
  j["architecture"] = bundle.architecture;
  Json agents = Json::array();
  for (const train::Agent& a : bundle.agents) {
    Json aj;
    aj["name"] = a.name;
    aj["action_offset"] = a.slice.offset;
    aj["action_dim"] = a.slice.size;
    aj["reward"] = train::to_string(a.channel);
    aj["actor"] = {{"widths", a.actor.mean_net().widths()},
                   {"params", vector_json(a.actor.mean_net().params())},
                   {"log_std", vector_json(a.actor.log_std())},
                   {"adam", adam_json(a.actor_adam)}};
    aj["critic"] = {{"widths", a.critic.widths()},
                    {"params", vector_json(a.critic.params())},
                    {"adam", adam_json(a.critic_adam)}};
    agents.push_back(std::move(aj));
  }
  j["agents"] = std::move(agents);
  return j;
}

train::PolicyBundle bundle_from_json(const Json& j) {
  train::PolicyBundle b;
  b.architecture = j.at("architecture").get<std::string>();
  for (const Json& aj : j.at("agents")) {
    train::Agent a;
    a.name = aj.at("name").get<std::string>();
    a.slice = {aj.at("action_offset").get<int>(), aj.at("action_dim").get<int>()};
    if (a.slice.offset < 0 || a.slice.size < 1 ||
        a.slice.offset + a.slice.size > sim::kNumJoints) {
      throw CheckpointMismatchError("agent " + a.name + ": invalid action slice");
    }
    a.channel = train::reward_channel_from(aj.at("reward").get<std::string>());
    const Json& actor = aj.at("actor");
    const auto aw = actor.at("widths").get<std::vector<int>>();
    nn::Mlp net = mlp_from(aw, actor.at("params"), a.name + ".actor");
    if (aw.front() != sim::kObservationSize || aw.back() != a.slice.size) {
      throw CheckpointMismatchError(a.name + ".actor: input/output widths do not match");
    }
    Eigen::VectorXd log_std = vector_from(actor.at("log_std"),
                                          static_cast<std::size_t>(a.slice.size),
                                          a.name + ".log_std");
    a.actor = nn::GaussianPolicy(std::move(net), log_std);
    a.actor_adam = adam_from(actor.at("adam"), a.actor.num_params(), a.name + ".actor.adam");
    const Json& critic = aj.at("critic");
    const auto cw = critic.at("widths").get<std::vector<int>>();
    a.critic = mlp_from(cw, critic.at("params"), a.name + ".critic");
    if (cw.front() != sim::kCriticInputSize || cw.back() != 1) {
      throw CheckpointMismatchError(a.name + ".critic: input/output widths do not match");
    }
    a.critic_adam = adam_from(critic.at("adam"), a.critic.num_params(), a.name + ".critic.adam");
    b.agents.push_back(std::move(a));
  }
  if (b.agents.empty()) throw CheckpointMismatchError("checkpoint has no agents");
  return b;
}

Json checkpoint_to_json(const Checkpoint& ckpt) {
  Json j;
  j["format"] = kFormatName;
  j["format_version"] = kCheckpointFormatVersion;
  j["tool_version"] = ckpt.tool_version;
  j["config_hash"] = ckpt.config_hash;
  j["iteration"] = ckpt.iteration;
  j["bundle"] = bundle_to_json(ckpt.bundle);
  j["trainer"] = ckpt.trainer_state ? *ckpt.trainer_state : Json(nullptr);
  return j;
}

Checkpoint checkpoint_from_json(const Json& j) {
  if (!j.is_object() || j.value("format", std::string()) != kFormatName) {
    throw CheckpointCorruptError("not a forcelab checkpoint");
  }
  const int version = j.at("format_version").get<int>();
  if (version != kCheckpointFormatVersion) {
    throw CheckpointMismatchError("checkpoint format version " + std::to_string(version) +
                                  " is not supported (expected " +
                                  std::to_string(kCheckpointFormatVersion) + ")");
  }
  Checkpoint c;
  c.tool_version = j.at("tool_version").get<std::string>();
  c.config_hash = j.at("config_hash").get<std::string>();
  c.iteration = j.at("iteration").get<long long>();
  c.bundle = bundle_from_json(j.at("bundle"));
  if (!j.at("trainer").is_null()) c.trainer_state = j.at("trainer");
  return c;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot write checkpoint: " + tmp);
    out << checkpoint_to_json(ckpt).dump() << '\n';
    if (!out) throw CheckpointError("failed writing checkpoint: " + tmp);
  }
  std::filesystem::rename(tmp, p);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointMissingError("checkpoint not found: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  Json j;
  try {
    j = Json::parse(ss.str());
  } catch (const Json::exception& e) {
    throw CheckpointCorruptError("checkpoint " + path + " is not valid JSON: " + e.what());
  }
  try {
    return checkpoint_from_json(j);
  } catch (const CheckpointError&) {
    throw;
  } catch (const std::exception& e) {
    throw CheckpointCorruptError("checkpoint " + path + " is malformed: " + e.what());
  }
}

Checkpoint make_checkpoint(const train::Trainer& trainer, const std::string& config_hash) {
  Checkpoint c;
  c.tool_version = FORCELAB_VERSION;
  c.config_hash = config_hash;
  c.iteration = trainer.iteration();
  c.bundle = trainer.bundle();
  c.trainer_state = trainer.state_json();
  return c;
}

void check_bundle_shape(const train::PolicyBundle& bundle, const train::TrainConfig& config) {
  if (bundle.architecture != config.architecture) {
    throw CheckpointMismatchError("checkpoint architecture " + bundle.architecture +
                                  " does not match configured " + config.architecture);
  }
  const train::PolicyBundle fresh = train::PolicyBundle::create(config, 0);
  if (fresh.agents.size() != bundle.agents.size()) {
    throw CheckpointMismatchError("checkpoint agent count does not match the configuration");
  }
  for (std::size_t k = 0; k < fresh.agents.size(); ++k) {
    const auto& want = fresh.agents[k];
    const auto& have = bundle.agents[k];
    if (want.actor.mean_net().widths() != have.actor.mean_net().widths() ||
        want.critic.widths() != have.critic.widths()) {
      throw CheckpointMismatchError("checkpoint layer widths for agent " + have.name +
                                    " do not match the configured hidden_layers");
    }
  }
}

void restore_trainer(train::Trainer& trainer, const Checkpoint& ckpt) {
  check_bundle_shape(ckpt.bundle, trainer.config());
  if (!ckpt.trainer_state) {
    throw CheckpointMismatchError("checkpoint holds no trainer state; cannot resume");
  }
  trainer.bundle() = ckpt.bundle;
  try {
    trainer.load_state(*ckpt.trainer_state);
  } catch (const std::invalid_argument& e) {
    throw CheckpointMismatchError(e.what());
  } catch (const Json::exception& e) {
    throw CheckpointCorruptError(std::string("trainer state is malformed: ") + e.what());
  }
}

}  // namespace forcelab
