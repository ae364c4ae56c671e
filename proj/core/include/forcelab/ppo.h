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

#ifndef FORCELAB_PPO_H_
#define FORCELAB_PPO_H_

#include <functional>
#include <span>

#include <Eigen/Core>

#include "forcelab/gaussian_policy.h"
#include "forcelab/mlp.h"

namespace forcelab::rl {

struct PpoCoefficients {
  double clip_eps = 0.15;
  double value_coef = 0.9;
  double entropy_coef = 0.02;
};

// One agent's view of a minibatch. Columns are samples.
struct Minibatch {
  Eigen::MatrixXd actor_obs;
  Eigen::MatrixXd critic_obs;
  Eigen::MatrixXd actions;
  Eigen::VectorXd old_log_prob;
  Eigen::VectorXd advantages;  // already normalized
  Eigen::VectorXd returns;
};

// An agent's additive share of the regularizer C for the minibatch, as a
// function of the policy mean, together with dC/dmean.
struct RegularizerShare {
  double value = 0.0;
  Eigen::MatrixXd grad_mean;
};
using RegularizerFn =
    std::function<RegularizerShare(const Eigen::MatrixXd& mean, const Minibatch& mb)>;

struct AgentLossResult {
  // Per-agent objective to maximize:
  //   surrogate - value_coef * value_loss + entropy_coef * entropy.
  double objective = 0.0;
  double surrogate = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  double regularizer = 0.0;  // this agent's share of C
  bool finite = true;
  // Gradients of loss() + reg_coef * regularizer, for minimization.
  Eigen::VectorXd actor_grad;
  Eigen::VectorXd critic_grad;

  double loss() const { return -objective; }
};

double clipped_surrogate(double ratio, double advantage, double clip_eps);

// Returns finite = false (and no gradients) when any probability ratio is
// not finite.
AgentLossResult agent_loss(const Minibatch& mb, const nn::GaussianPolicy& actor,
                           const nn::Mlp& critic, const PpoCoefficients& coef,
                           double reg_coef = 0.0,
                           const RegularizerFn* regularizer = nullptr);

// C = (1/T) sum_t sum_i ||a_t^i||^2 over per-agent action batches.
double torque_regularizer(std::span<const Eigen::MatrixXd> per_agent_actions);

// Share of C for one agent's mean actions: value and gradient 2a/T.
RegularizerShare action_regularizer_share(const Eigen::MatrixXd& mean);

// Normalizes to zero mean and unit standard deviation (epsilon 1e-8).
Eigen::VectorXd normalize_advantages(const Eigen::VectorXd& adv);

}  // namespace forcelab::rl

#endif  // FORCELAB_PPO_H_
