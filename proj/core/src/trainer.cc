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

#include "forcelab/trainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "forcelab/csv.h"
#include "forcelab/gae.h"

namespace forcelab::train {
namespace {

constexpr std::size_t kLengthWindow = 100;

Eigen::VectorXd clip_norm(const Eigen::VectorXd& g, double max_norm) {
  const double n = g.norm();
  if (max_norm > 0.0 && n > max_norm) return g * (max_norm / n);
  return g;
}

rl::Minibatch gather(const AgentRollout& r, std::span<const int> idx) {
  const auto b = static_cast<Eigen::Index>(idx.size());
  rl::Minibatch mb;
  mb.actor_obs.resize(r.actor_obs.rows(), b);
  mb.critic_obs.resize(r.critic_obs.rows(), b);
  mb.actions.resize(r.actions.rows(), b);
  mb.old_log_prob.resize(b);
  Eigen::VectorXd adv(b);
  mb.returns.resize(b);
  for (Eigen::Index c = 0; c < b; ++c) {
    const int s = idx[static_cast<std::size_t>(c)];
    mb.actor_obs.col(c) = r.actor_obs.col(s);
    mb.critic_obs.col(c) = r.critic_obs.col(s);
    mb.actions.col(c) = r.actions.col(s);
    mb.old_log_prob(c) = r.log_prob(s);
    adv(c) = r.advantages(s);
    mb.returns(c) = r.returns(s);
  }
  mb.advantages = rl::normalize_advantages(adv);
  return mb;
}

void apply_gradients(Agent& agent, const rl::AgentLossResult& res,
                     const TrainConfig& config) {
  nn::AdamConfig adam;
  adam.learning_rate = config.learning_rate;
  Eigen::VectorXd actor_params = agent.actor.parameters();
  nn::adam_step(agent.actor_adam, adam, actor_params,
                clip_norm(res.actor_grad, config.max_grad_norm));
  agent.actor.set_parameters(actor_params);
  Eigen::VectorXd critic_params = agent.critic.params();
  nn::adam_step(agent.critic_adam, adam, critic_params,
                clip_norm(res.critic_grad, config.max_grad_norm));
  agent.critic.set_params(critic_params);
}

UpdateStats update_agents(std::vector<Agent*>& agents,
                          std::vector<const AgentRollout*>& rollouts,
                          const TrainConfig& config, const sim::SimConfig& sim_config,
                          const MinibatchPlan& plan) {
  const std::size_t n_agents = agents.size();
  std::vector<rl::RegularizerFn> regs;
  for (Agent* a : agents) regs.push_back(make_regularizer(config, sim_config, *a));
  std::vector<Agent> snapshot;
  for (Agent* a : agents) snapshot.push_back(*a);
  auto restore = [&] {
    for (std::size_t k = 0; k < n_agents; ++k) *agents[k] = snapshot[k];
  };

  const rl::PpoCoefficients coef{config.clip_eps, config.value_coef, config.entropy_coef};
  UpdateStats stats;
  stats.agent_loss.assign(n_agents, 0.0);
  std::vector<rl::AgentLossResult> results(n_agents);
  for (const std::vector<int>& perm : plan) {
    const std::size_t n = perm.size();
    for (int m = 0; m < config.num_minibatches; ++m) {
      const std::size_t lo = n * static_cast<std::size_t>(m) / config.num_minibatches;
      const std::size_t hi = n * static_cast<std::size_t>(m + 1) / config.num_minibatches;
      const std::span<const int> idx(perm.data() + lo, hi - lo);
      bool finite = true;
      for (std::size_t k = 0; k < n_agents && finite; ++k) {
        const rl::Minibatch mb = gather(*rollouts[k], idx);
        results[k] = rl::agent_loss(mb, agents[k]->actor, agents[k]->critic, coef,
                                    config.reg_coef, &regs[k]);
        finite = results[k].finite;
      }
      if (!finite) {
        ++stats.skipped_minibatches;
        continue;
      }
      double c = 0.0;
      double total = 0.0;
      for (const auto& r : results) {
        c += r.regularizer;
        total += r.loss();
      }
      total += config.reg_coef * c;
      if (!std::isfinite(total)) {
        restore();
        throw TrainingAbort("non-finite total loss; parameters restored");
      }
      try {
        for (std::size_t k = 0; k < n_agents; ++k) {
          apply_gradients(*agents[k], results[k], config);
        }
      } catch (const nn::NonFiniteGradientError& e) {
        restore();
        throw TrainingAbort(std::string("non-finite gradient; parameters restored: ") +
                            e.what());
      }
      for (std::size_t k = 0; k < n_agents; ++k) {
        stats.agent_loss[k] += results[k].loss();
        stats.approx_kl += results[k].approx_kl;
        stats.clip_fraction += results[k].clip_fraction;
      }
      stats.regularizer += c;
      stats.total_loss += total;
      ++stats.minibatches;
    }
  }
  if (stats.minibatches > 0) {
    const double inv = 1.0 / stats.minibatches;
    for (double& l : stats.agent_loss) l *= inv;
    stats.regularizer *= inv;
    stats.total_loss *= inv;
    stats.approx_kl *= inv / static_cast<double>(n_agents);
    stats.clip_fraction *= inv / static_cast<double>(n_agents);
  }
  return stats;
}

}  // namespace

void TrainConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("train config: ") + what);
  };
  require(iterations >= 0, "iterations must be >= 0");
  require(learning_rate > 0.0, "learning_rate must be > 0");
  require(gamma > 0.0 && gamma <= 1.0, "gamma must be in (0, 1]");
  require(gae_lambda >= 0.0 && gae_lambda <= 1.0, "gae_lambda must be in [0, 1]");
  require(clip_eps > 0.0 && clip_eps < 1.0, "clip_eps must be in (0, 1)");
  require(entropy_coef >= 0.0 && value_coef >= 0.0 && reg_coef >= 0.0,
          "loss coefficients must be >= 0");
  require(regularizer == "action" || regularizer == "pd_torque",
          "regularizer must be action or pd_torque");
  require(epochs >= 1 && num_minibatches >= 1, "epochs and num_minibatches must be >= 1");
  require(rollout_length >= 1 && num_envs >= 1, "rollout_length and num_envs must be >= 1");
  require(num_envs * rollout_length >= num_minibatches,
          "fewer samples than minibatches");
  require(!hidden_layers.empty(), "hidden_layers must not be empty");
  for (int w : hidden_layers) require(w >= 1, "hidden widths must be >= 1");
  require(architecture == "decoupled" || architecture == "monolithic",
          "architecture must be decoupled or monolithic");
  require(init_log_std >= nn::kLogStdMin && init_log_std <= nn::kLogStdMax,
          "init_log_std out of range");
  require(max_grad_norm >= 0.0, "max_grad_norm must be >= 0");
  require(checkpoint_every >= 0, "checkpoint_every must be >= 0");
}

int curriculum_stage(int iteration, int switch_iteration) {
  return iteration < switch_iteration ? 1 : 2;
}

std::string to_string(RewardChannel c) {
  switch (c) {
    case RewardChannel::kLower: return "lower";
    case RewardChannel::kWaist: return "waist";
    case RewardChannel::kUpper: return "upper";
    case RewardChannel::kSum: return "sum";
  }
  return "sum";
}

RewardChannel reward_channel_from(const std::string& name) {
  if (name == "lower") return RewardChannel::kLower;
  if (name == "waist") return RewardChannel::kWaist;
  if (name == "upper") return RewardChannel::kUpper;
  if (name == "sum") return RewardChannel::kSum;
  throw std::invalid_argument("unknown reward channel: " + name);
}

double reward_of(const sim::Rewards& r, RewardChannel c) {
  switch (c) {
    case RewardChannel::kLower: return r.lower;
    case RewardChannel::kWaist: return r.waist;
    case RewardChannel::kUpper: return r.upper;
    case RewardChannel::kSum: return r.sum();
  }
  return r.sum();
}

PolicyBundle PolicyBundle::create(const TrainConfig& config, std::uint64_t seed) {
  config.validate();
  struct Spec {
    const char* name;
    sim::AgentSlice slice;
    RewardChannel channel;
  };
  std::vector<Spec> specs;
  if (config.architecture == "monolithic") {
    specs.push_back({"joint", {0, sim::kNumJoints}, RewardChannel::kSum});
  } else {
    specs.push_back({"lower", sim::kLowerSlice, RewardChannel::kLower});
    specs.push_back({"waist", sim::kWaistSlice, RewardChannel::kWaist});
    specs.push_back({"upper", sim::kUpperSlice, RewardChannel::kUpper});
  }
  PolicyBundle bundle;
  bundle.architecture = config.architecture;
  Rng rng(seed);
  for (const Spec& s : specs) {
    Agent a;
    a.name = s.name;
    a.slice = s.slice;
    a.channel = s.channel;
    std::vector<int> actor_w{sim::kObservationSize};
    std::vector<int> critic_w{sim::kCriticInputSize};
    for (int h : config.hidden_layers) {
      actor_w.push_back(h);
      critic_w.push_back(h);
    }
    actor_w.push_back(s.slice.size);
    critic_w.push_back(1);
    a.actor = nn::GaussianPolicy(actor_w, rng, config.init_log_std);
    a.critic = nn::Mlp(critic_w, rng, 1.0);
    a.actor_adam = nn::AdamState(static_cast<Eigen::Index>(a.actor.num_params()));
    a.critic_adam = nn::AdamState(static_cast<Eigen::Index>(a.critic.num_params()));
    bundle.agents.push_back(std::move(a));
  }
  return bundle;
}

sim::JointVector PolicyBundle::act(const sim::Observation& obs) const {
  const auto v = obs.to_vector();
  const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(v.data(), sim::kObservationSize);
  sim::JointVector out{};
  for (const Agent& a : agents) {
    const Eigen::VectorXd mu = a.actor.mean(x);
    for (int j = 0; j < a.slice.size; ++j) out[a.slice.offset + j] = mu(j);
  }
  return out;
}

VecEnv::VecEnv(const sim::SimConfig& config, int num_envs, std::uint64_t master_seed)
    : master_seed_(master_seed) {
  if (num_envs < 1) throw std::invalid_argument("num_envs must be >= 1");
  const sim::Env prototype(config);
  envs_.assign(static_cast<std::size_t>(num_envs), prototype);
  current_.resize(envs_.size());
  episode_index_.assign(envs_.size(), 0);
  const std::uint64_t noise_root = derive_seed(master_seed, 0xA0A0);
  for (int i = 0; i < num_envs; ++i) {
    noise_.emplace_back(derive_seed(noise_root, static_cast<std::uint64_t>(i)));
  }
}

void VecEnv::reset_slot(int i) {
  const std::uint64_t seed =
      derive_seed(master_seed_, static_cast<std::uint64_t>(i), episode_index_[i]++);
  current_[i] = envs_[i].reset(seed, stage_);
}

void VecEnv::reset_all(int stage) {
  stage_ = stage;
  lengths_.clear();
  for (int i = 0; i < size(); ++i) reset_slot(i);
}

sim::StepResult VecEnv::step(int i, std::span<const double> actions) {
  sim::StepResult r = envs_[i].step(actions);
  if (r.done) {
    lengths_.push_back(envs_[i].step_index());
    if (lengths_.size() > kLengthWindow) lengths_.pop_front();
    ++finished_;
    reset_slot(i);
  } else {
    current_[i] = r;
  }
  return r;
}

double VecEnv::mean_episode_length() const {
  if (!lengths_.empty()) {
    return std::accumulate(lengths_.begin(), lengths_.end(), 0.0) /
           static_cast<double>(lengths_.size());
  }
  double acc = 0.0;
  for (const auto& e : envs_) acc += e.step_index();
  return acc / static_cast<double>(envs_.size());
}

Json VecEnv::to_json() const {
  Json j;
  j["master_seed"] = master_seed_;
  j["stage"] = stage_;
  j["finished"] = finished_;
  j["lengths"] = Json(std::vector<int>(lengths_.begin(), lengths_.end()));
  Json slots = Json::array();
  for (std::size_t i = 0; i < envs_.size(); ++i) {
    slots.push_back({{"episode_index", episode_index_[i]},
                     {"noise_rng", noise_[i].state()},
                     {"env", envs_[i].state_json()}});
  }
  j["slots"] = std::move(slots);
  return j;
}

void VecEnv::from_json(const Json& j) {
  const Json& slots = j.at("slots");
  if (slots.size() != envs_.size()) {
    throw std::invalid_argument("checkpoint has " + std::to_string(slots.size()) +
                                " environments, config has " +
                                std::to_string(envs_.size()));
  }
  master_seed_ = j.at("master_seed").get<std::uint64_t>();
  stage_ = j.at("stage").get<int>();
  finished_ = j.at("finished").get<long long>();
  const auto lengths = j.at("lengths").get<std::vector<int>>();
  lengths_.assign(lengths.begin(), lengths.end());
  for (std::size_t i = 0; i < envs_.size(); ++i) {
    const Json& s = slots[i];
    episode_index_[i] = s.at("episode_index").get<std::uint64_t>();
    noise_[i].set_state(s.at("noise_rng").get<std::string>());
    envs_[i].load_state(s.at("env"));
    sim::StepResult r;
    r.observation = envs_[i].observation();
    r.privileged = envs_[i].privileged();
    current_[i] = r;
  }
}

Eigen::VectorXd actor_input(const sim::StepResult& r) {
  const auto v = r.observation.to_vector();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), sim::kObservationSize);
}

Eigen::VectorXd critic_input(const sim::StepResult& r) {
  const auto o = r.observation.to_vector();
  const auto p = r.privileged.to_vector();
  Eigen::VectorXd x(sim::kCriticInputSize);
  for (int i = 0; i < sim::kObservationSize; ++i) x(i) = o[i];
  for (int i = 0; i < sim::kPrivilegedSize; ++i) x(sim::kObservationSize + i) = p[i];
  return x;
}

std::vector<AgentRollout> collect_rollouts(const PolicyBundle& bundle, VecEnv& envs,
                                           int horizon) {
  const int n_env = envs.size();
  const Eigen::Index total = static_cast<Eigen::Index>(n_env) * horizon;
  std::vector<AgentRollout> out(bundle.agents.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    AgentRollout& r = out[k];
    r.num_envs = n_env;
    r.horizon = horizon;
    r.actor_obs.resize(sim::kObservationSize, total);
    r.critic_obs.resize(sim::kCriticInputSize, total);
    r.actions.resize(bundle.agents[k].slice.size, total);
    r.log_prob.resize(total);
    r.values.resize(total);
    r.rewards.resize(total);
    r.dones.assign(static_cast<std::size_t>(total), 0);
  }

  Eigen::MatrixXd obs(sim::kObservationSize, n_env);
  Eigen::MatrixXd cobs(sim::kCriticInputSize, n_env);
  std::vector<Eigen::MatrixXd> means(out.size());
  std::vector<Eigen::MatrixXd> values(out.size());
  std::vector<Eigen::MatrixXd> actions(out.size());
  auto gather_obs = [&] {
    for (int i = 0; i < n_env; ++i) {
      obs.col(i) = actor_input(envs.current(i));
      cobs.col(i) = critic_input(envs.current(i));
    }
    if (!obs.allFinite() || !cobs.allFinite()) {
      throw TrainingAbort("non-finite observation from the simulator");
    }
  };

  for (int t = 0; t < horizon; ++t) {
    gather_obs();
    for (std::size_t k = 0; k < out.size(); ++k) {
      means[k] = bundle.agents[k].actor.mean(obs);
      values[k] = bundle.agents[k].critic.forward(cobs);
      if (!means[k].allFinite() || !values[k].allFinite()) {
        throw TrainingAbort("non-finite output from agent " + bundle.agents[k].name);
      }
      actions[k].resize(means[k].rows(), n_env);
    }
    std::vector<double> joint(sim::kNumJoints);
    for (int i = 0; i < n_env; ++i) {
      for (std::size_t k = 0; k < out.size(); ++k) {
        const Agent& a = bundle.agents[k];
        actions[k].col(i) = a.actor.sample(means[k].col(i), envs.noise_rng(i));
        for (int j = 0; j < a.slice.size; ++j) joint[a.slice.offset + j] = actions[k](j, i);
      }
      const Eigen::Index s = static_cast<Eigen::Index>(i) * horizon + t;
      for (std::size_t k = 0; k < out.size(); ++k) {
        out[k].actor_obs.col(s) = obs.col(i);
        out[k].critic_obs.col(s) = cobs.col(i);
        out[k].values(s) = values[k](0, i);
      }
      const sim::StepResult r = envs.step(i, joint);
      for (std::size_t k = 0; k < out.size(); ++k) {
        out[k].rewards(s) = reward_of(r.rewards, bundle.agents[k].channel);
        out[k].dones[static_cast<std::size_t>(s)] = r.done ? 1 : 0;
      }
    }
    for (std::size_t k = 0; k < out.size(); ++k) {
      const Eigen::VectorXd lp = bundle.agents[k].actor.log_prob(means[k], actions[k]);
      for (int i = 0; i < n_env; ++i) {
        const Eigen::Index s = static_cast<Eigen::Index>(i) * horizon + t;
        out[k].actions.col(s) = actions[k].col(i);
        out[k].log_prob(s) = lp(i);
      }
    }
  }
  gather_obs();
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].bootstrap = bundle.agents[k].critic.forward(cobs).row(0).transpose();
  }
  return out;
}

void compute_advantages(std::vector<AgentRollout>& rollouts, double gamma,
                        double lambda) {
  for (AgentRollout& r : rollouts) {
    const Eigen::Index total = static_cast<Eigen::Index>(r.num_envs) * r.horizon;
    r.advantages.resize(total);
    r.returns.resize(total);
    std::vector<double> values(static_cast<std::size_t>(r.horizon) + 1);
    for (int i = 0; i < r.num_envs; ++i) {
      const Eigen::Index base = static_cast<Eigen::Index>(i) * r.horizon;
      for (int t = 0; t < r.horizon; ++t) values[t] = r.values(base + t);
      values[r.horizon] = r.bootstrap(i);
      const rl::GaeResult g = rl::compute_gae(
          std::span<const double>(r.rewards.data() + base, r.horizon), values,
          std::span<const std::uint8_t>(r.dones.data() + base, r.horizon), gamma,
          lambda);
      for (int t = 0; t < r.horizon; ++t) {
        r.advantages(base + t) = g.advantages[t];
        r.returns(base + t) = g.returns[t];
      }
    }
  }
}

MinibatchPlan make_minibatch_plan(int num_samples, int epochs, Rng& rng) {
  MinibatchPlan plan;
  for (int e = 0; e < epochs; ++e) {
    std::vector<int> perm(static_cast<std::size_t>(num_samples));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng.engine());
    plan.push_back(std::move(perm));
  }
  return plan;
}

rl::RegularizerFn make_regularizer(const TrainConfig& config,
                                   const sim::SimConfig& sim_config,
                                   const Agent& agent) {
  if (config.regularizer == "action") {
    return [](const Eigen::MatrixXd& mean, const rl::Minibatch&) {
      return rl::action_regularizer_share(mean);
    };
  }
  // PD torque implied by the mean action at the sampled state, in units of
  // the joint torque limit. Joint-limit clamping of the target is ignored.
  const sim::AgentSlice slice = agent.slice;
  std::vector<sim::JointSpec> joints(sim_config.layout.joints.begin() + slice.offset,
                                     sim_config.layout.joints.begin() + slice.offset +
                                         slice.size);
  const double scale = sim_config.action_scale;
  return [joints, slice, scale](const Eigen::MatrixXd& mean, const rl::Minibatch& mb) {
    rl::RegularizerShare share;
    share.grad_mean.resize(mean.rows(), mean.cols());
    const double inv_t = 1.0 / static_cast<double>(mean.cols());
    double acc = 0.0;
    for (Eigen::Index c = 0; c < mean.cols(); ++c) {
      for (int j = 0; j < slice.size; ++j) {
        const sim::JointSpec& s = joints[static_cast<std::size_t>(j)];
        const double q = mb.actor_obs(slice.offset + j, c);
        const double dq = mb.actor_obs(sim::kNumJoints + slice.offset + j, c) /
                          sim::kJointVelocityScale;
        const double tau =
            (s.kp * (s.nominal + scale * mean(j, c) - q) - s.kd * dq) / s.torque_limit;
        acc += tau * tau;
        share.grad_mean(j, c) = 2.0 * inv_t * tau * s.kp * scale / s.torque_limit;
      }
    }
    share.value = acc * inv_t;
    return share;
  };
}

UpdateStats total_update(PolicyBundle& bundle, const std::vector<AgentRollout>& rollouts,
                         const TrainConfig& config, const sim::SimConfig& sim_config,
                         const MinibatchPlan& plan) {
  if (rollouts.size() != bundle.agents.size()) {
    throw std::invalid_argument("total_update: one rollout per agent required");
  }
  std::vector<Agent*> agents;
  std::vector<const AgentRollout*> rs;
  for (std::size_t k = 0; k < rollouts.size(); ++k) {
    agents.push_back(&bundle.agents[k]);
    rs.push_back(&rollouts[k]);
  }
  return update_agents(agents, rs, config, sim_config, plan);
}

void update_single_agent(Agent& agent, const AgentRollout& rollout,
                         const TrainConfig& config, const sim::SimConfig& sim_config,
                         const MinibatchPlan& plan) {
  std::vector<Agent*> agents{&agent};
  std::vector<const AgentRollout*> rs{&rollout};
  update_agents(agents, rs, config, sim_config, plan);
}

std::vector<std::string> log_header(const PolicyBundle& bundle) {
  std::vector<std::string> h{"iteration", "stage"};
  for (const Agent& a : bundle.agents) h.push_back("reward_" + a.name);
  for (const Agent& a : bundle.agents) h.push_back("loss_" + a.name);
  for (const char* s : {"regularizer", "total_loss", "approx_kl", "clip_fraction",
                        "mean_episode_length", "skipped_minibatches"}) {
    h.emplace_back(s);
  }
  return h;
}

std::vector<std::string> log_row(const IterationLog& log) {
  std::vector<std::string> row{std::to_string(log.iteration), std::to_string(log.stage)};
  for (double r : log.mean_reward) row.push_back(format_double(r));
  for (double l : log.update.agent_loss) row.push_back(format_double(l));
  row.push_back(format_double(log.update.regularizer));
  row.push_back(format_double(log.update.total_loss));
  row.push_back(format_double(log.update.approx_kl));
  row.push_back(format_double(log.update.clip_fraction));
  row.push_back(format_double(log.mean_episode_length));
  row.push_back(std::to_string(log.update.skipped_minibatches));
  return row;
}

Trainer::Trainer(TrainConfig config, sim::SimConfig sim_config, std::uint64_t seed)
    : config_(std::move(config)),
      sim_config_(std::move(sim_config)),
      seed_(seed),
      bundle_(PolicyBundle::create(config_, derive_seed(seed, 1))),
      envs_(sim_config_, config_.num_envs, derive_seed(seed, 2)),
      shuffle_rng_(derive_seed(seed, 3)) {
  envs_.reset_all(curriculum_stage(0, config_.curriculum_switch));
}

IterationLog Trainer::run_iteration() {
  const int stage = curriculum_stage(iteration_, config_.curriculum_switch);
  if (stage != envs_.stage()) envs_.reset_all(stage);
  std::vector<AgentRollout> rollouts = collect_rollouts(bundle_, envs_, config_.rollout_length);
  compute_advantages(rollouts, config_.gamma, config_.gae_lambda);
  const MinibatchPlan plan = make_minibatch_plan(
      config_.num_envs * config_.rollout_length, config_.epochs, shuffle_rng_);
  IterationLog log;
  log.iteration = iteration_ + 1;
  log.stage = stage;
  for (const AgentRollout& r : rollouts) log.mean_reward.push_back(r.rewards.mean());
  log.update = total_update(bundle_, rollouts, config_, sim_config_, plan);
  log.mean_episode_length = envs_.mean_episode_length();
  ++iteration_;
  return log;
}

Json Trainer::state_json() const {
  Json j;
  j["iteration"] = iteration_;
  j["seed"] = seed_;
  j["shuffle_rng"] = shuffle_rng_.state();
  j["envs"] = envs_.to_json();
  return j;
}

void Trainer::load_state(const Json& j) {
  iteration_ = j.at("iteration").get<int>();
  seed_ = j.at("seed").get<std::uint64_t>();
  shuffle_rng_.set_state(j.at("shuffle_rng").get<std::string>());
  envs_.from_json(j.at("envs"));
}

}  // namespace forcelab::train
