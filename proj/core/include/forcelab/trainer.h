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

#ifndef FORCELAB_TRAINER_H_
#define FORCELAB_TRAINER_H_

#include <cstdint>
#include <deque>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "forcelab/adam.h"
#include "forcelab/body.h"
#include "forcelab/gaussian_policy.h"
#include "forcelab/json.h"
#include "forcelab/mlp.h"
#include "forcelab/ppo.h"
#include "forcelab/rng.h"
#include "forcelab/sim.h"

namespace forcelab::train {

class TrainingAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  int iterations = 10000;
  double learning_rate = 5e-4;
  double gamma = 0.98;
  double clip_eps = 0.15;
  double entropy_coef = 0.02;
  double value_coef = 0.9;
  double gae_lambda = 0.95;
  double reg_coef = 1e-3;
  std::string regularizer = "action";  // "action" or "pd_torque"
  int epochs = 4;
  int num_minibatches = 4;
  int rollout_length = 64;
  int num_envs = 64;
  int curriculum_switch = 5000;
  std::vector<int> hidden_layers{128, 64, 32};
  std::string architecture = "decoupled";  // or "monolithic"
  double init_log_std = -0.7;
  double max_grad_norm = 1.0;
  int checkpoint_every = 0;  // 0 disables periodic checkpoints

  void validate() const;
};

int curriculum_stage(int iteration, int switch_iteration);

enum class RewardChannel { kLower, kWaist, kUpper, kSum };
std::string to_string(RewardChannel c);
RewardChannel reward_channel_from(const std::string& name);
double reward_of(const sim::Rewards& r, RewardChannel c);

struct Agent {
  std::string name;
  sim::AgentSlice slice{0, 0};
  RewardChannel channel = RewardChannel::kSum;
  nn::GaussianPolicy actor;
  nn::Mlp critic;
  nn::AdamState actor_adam;
  nn::AdamState critic_adam;
};

// The set of cooperating agents. Decoupled: lower (ankle, knee, hip), waist
// and upper (shoulder, elbow), each with its own reward channel. Monolithic:
// one agent over all six joints on the summed reward.
struct PolicyBundle {
  std::string architecture;
  std::vector<Agent> agents;

  static PolicyBundle create(const TrainConfig& config, std::uint64_t seed);
  // Concatenated deterministic (mean) actions for one observation.
  sim::JointVector act(const sim::Observation& obs) const;
};

// Parallel environments with per-slot RNG streams. Episodes auto-reset on
// termination with seeds derived from (master seed, slot, episode index).
class VecEnv {
 public:
  VecEnv(const sim::SimConfig& config, int num_envs, std::uint64_t master_seed);

  int size() const { return static_cast<int>(envs_.size()); }
  int stage() const { return stage_; }
  void reset_all(int stage);
  sim::Env& env(int i) { return envs_[i]; }
  const sim::Env& env(int i) const { return envs_[i]; }
  const sim::StepResult& current(int i) const { return current_[i]; }
  Rng& noise_rng(int i) { return noise_[i]; }
  // Steps slot i and resets it if the episode ended. The returned result is
  // the terminal transition (done set) in that case.
  sim::StepResult step(int i, std::span<const double> actions);

  // Mean length over the last 100 finished episodes. Before any episode has
  // finished, the mean length of the running episodes.
  double mean_episode_length() const;
  const std::deque<int>& recent_lengths() const { return lengths_; }
  long long episodes_finished() const { return finished_; }

  Json to_json() const;
  void from_json(const Json& j);

 private:
  void reset_slot(int i);

  std::uint64_t master_seed_;
  int stage_ = 1;
  std::vector<sim::Env> envs_;
  std::vector<sim::StepResult> current_;
  std::vector<Rng> noise_;
  std::vector<std::uint64_t> episode_index_;
  std::deque<int> lengths_;
  long long finished_ = 0;
};

// Transitions for one agent, stored env-major: sample index = env * T + t.
struct AgentRollout {
  int num_envs = 0;
  int horizon = 0;
  Eigen::MatrixXd actor_obs;
  Eigen::MatrixXd critic_obs;
  Eigen::MatrixXd actions;
  Eigen::VectorXd log_prob;
  Eigen::VectorXd values;
  Eigen::VectorXd rewards;
  std::vector<std::uint8_t> dones;
  Eigen::VectorXd bootstrap;  // V(s_T) per env
  Eigen::VectorXd advantages;
  Eigen::VectorXd returns;
};

Eigen::VectorXd critic_input(const sim::StepResult& r);
Eigen::VectorXd actor_input(const sim::StepResult& r);

std::vector<AgentRollout> collect_rollouts(const PolicyBundle& bundle, VecEnv& envs,
                                           int horizon);

// Fills advantages and returns of every rollout.
void compute_advantages(std::vector<AgentRollout>& rollouts, double gamma,
                        double lambda);

// One shuffled permutation per epoch, shared by all agents.
using MinibatchPlan = std::vector<std::vector<int>>;
MinibatchPlan make_minibatch_plan(int num_samples, int epochs, Rng& rng);

// Regularizer share for an agent, selected by TrainConfig::regularizer.
rl::RegularizerFn make_regularizer(const TrainConfig& config,
                                   const sim::SimConfig& sim_config,
                                   const Agent& agent);

struct UpdateStats {
  std::vector<double> agent_loss;  // mean over minibatches, -objective
  double regularizer = 0.0;        // mean C over minibatches
  double total_loss = 0.0;         // mean of per-minibatch sum_i L_i + reg_coef C
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
  int minibatches = 0;
  int skipped_minibatches = 0;
};

// Joint update: per minibatch, every agent takes one Adam step on its own
// clipped loss plus reg_coef times its share of C.
UpdateStats total_update(PolicyBundle& bundle, const std::vector<AgentRollout>& rollouts,
                         const TrainConfig& config, const sim::SimConfig& sim_config,
                         const MinibatchPlan& plan);

// The same update restricted to one agent, ignoring the others.
void update_single_agent(Agent& agent, const AgentRollout& rollout,
                         const TrainConfig& config, const sim::SimConfig& sim_config,
                         const MinibatchPlan& plan);

struct IterationLog {
  int iteration = 0;
  int stage = 1;
  std::vector<double> mean_reward;  // per agent, per transition
  UpdateStats update;
  double mean_episode_length = 0.0;
};

std::vector<std::string> log_header(const PolicyBundle& bundle);
std::vector<std::string> log_row(const IterationLog& log);

class Trainer {
 public:
  Trainer(TrainConfig config, sim::SimConfig sim_config, std::uint64_t seed);

  // Collects rollouts and updates all agents. Throws TrainingAbort (after
  // restoring the pre-update parameters) if the loss turns non-finite.
  IterationLog run_iteration();

  int iteration() const { return iteration_; }
  const TrainConfig& config() const { return config_; }
  const sim::SimConfig& sim_config() const { return sim_config_; }
  const PolicyBundle& bundle() const { return bundle_; }
  PolicyBundle& bundle() { return bundle_; }
  const VecEnv& envs() const { return envs_; }

  // Everything needed for a bit-exact resume, besides the bundle itself.
  Json state_json() const;
  void load_state(const Json& j);

 private:
  TrainConfig config_;
  sim::SimConfig sim_config_;
  std::uint64_t seed_;
  PolicyBundle bundle_;
  VecEnv envs_;
  Rng shuffle_rng_;
  int iteration_ = 0;
};

}  // namespace forcelab::train

#endif  // FORCELAB_TRAINER_H_
