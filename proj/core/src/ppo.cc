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

#include "forcelab/ppo.h"

#include <algorithm>
#include <cmath>

namespace forcelab::rl {

double clipped_surrogate(double ratio, double advantage, double clip_eps) {
  const double clipped = std::clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps);
  return std::min(ratio * advantage, clipped * advantage);
}

AgentLossResult agent_loss(const Minibatch& mb, const nn::GaussianPolicy& actor,
                           const nn::Mlp& critic, const PpoCoefficients& coef,
                           double reg_coef, const RegularizerFn* regularizer) {
  AgentLossResult out;
  const Eigen::Index batch = mb.actions.cols();
  const double inv_b = 1.0 / static_cast<double>(batch);

  nn::Mlp::Cache actor_cache;
  const Eigen::MatrixXd mean = actor.mean(mb.actor_obs, &actor_cache);
  const Eigen::VectorXd log_prob = actor.log_prob(mean, mb.actions);
  const Eigen::VectorXd ratio = (log_prob - mb.old_log_prob).array().exp();
  if (!ratio.allFinite()) {
    out.finite = false;
    return out;
  }

  // Surrogate and its gradient w.r.t. log-probabilities of the loss (-surrogate).
  Eigen::VectorXd dloss_dlogp(batch);
  double surrogate = 0.0;
  double clipped = 0.0;
  double kl = 0.0;
  for (Eigen::Index t = 0; t < batch; ++t) {
    const double r = ratio(t);
    const double adv = mb.advantages(t);
    surrogate += clipped_surrogate(r, adv, coef.clip_eps);
    const bool saturated = (r > 1.0 + coef.clip_eps && adv > 0.0) ||
                           (r < 1.0 - coef.clip_eps && adv < 0.0);
    dloss_dlogp(t) = saturated ? 0.0 : -inv_b * r * adv;
    if (std::abs(r - 1.0) > coef.clip_eps) clipped += 1.0;
    kl += (r - 1.0) - std::log(r);
  }
  out.surrogate = surrogate * inv_b;
  out.clip_fraction = clipped * inv_b;
  out.approx_kl = kl * inv_b;
  out.entropy = actor.entropy();

  nn::Mlp::Cache critic_cache;
  const Eigen::MatrixXd values = critic.forward(mb.critic_obs, &critic_cache);
  const Eigen::RowVectorXd err = values.row(0) - mb.returns.transpose();
  out.value_loss = err.squaredNorm() * inv_b;

  out.objective = out.surrogate - coef.value_coef * out.value_loss +
                  coef.entropy_coef * out.entropy;

  // Actor: d loss / d mean and d loss / d log_std.
  const Eigen::ArrayXd inv_var = (-2.0 * actor.log_std()).array().exp();
  const Eigen::MatrixXd diff = mb.actions - mean;
  Eigen::MatrixXd upstream(mean.rows(), batch);
  Eigen::VectorXd dlog_std = Eigen::VectorXd::Constant(actor.action_dim(), -coef.entropy_coef);
  for (Eigen::Index t = 0; t < batch; ++t) {
    const Eigen::ArrayXd z2 = diff.col(t).array().square() * inv_var;
    upstream.col(t) = dloss_dlogp(t) * (diff.col(t).array() * inv_var).matrix();
    dlog_std += dloss_dlogp(t) * (z2 - 1.0).matrix();
  }
  if (regularizer != nullptr) {
    RegularizerShare share = (*regularizer)(mean, mb);
    out.regularizer = share.value;
    if (reg_coef != 0.0) upstream += reg_coef * share.grad_mean;
  }
  const std::size_t mlp_params = actor.mean_net().num_params();
  Eigen::VectorXd mlp_grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mlp_params));
  actor.mean_net().backward(actor_cache, upstream, mlp_grad);
  out.actor_grad.resize(static_cast<Eigen::Index>(actor.num_params()));
  out.actor_grad << mlp_grad, dlog_std;

  const Eigen::MatrixXd dvalue = (2.0 * coef.value_coef * inv_b) * err;
  out.critic_grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(critic.num_params()));
  critic.backward(critic_cache, dvalue, out.critic_grad);
  return out;
}

double torque_regularizer(std::span<const Eigen::MatrixXd> per_agent_actions) {
  if (per_agent_actions.empty()) return 0.0;
  const Eigen::Index horizon = per_agent_actions.front().cols();
  double acc = 0.0;
  for (const auto& a : per_agent_actions) {
    if (a.cols() != horizon) {
      throw std::invalid_argument("torque_regularizer: misaligned horizons");
    }
    acc += a.squaredNorm();
  }
  return horizon > 0 ? acc / static_cast<double>(horizon) : 0.0;
}

RegularizerShare action_regularizer_share(const Eigen::MatrixXd& mean) {
  const double inv_t = 1.0 / static_cast<double>(mean.cols());
  return {mean.squaredNorm() * inv_t, (2.0 * inv_t) * mean};
}

Eigen::VectorXd normalize_advantages(const Eigen::VectorXd& adv) {
  if (adv.size() == 0) return adv;
  const double mu = adv.mean();
  const Eigen::ArrayXd centered = adv.array() - mu;
  const double var = adv.size() > 1
                         ? centered.square().sum() / static_cast<double>(adv.size() - 1)
                         : 0.0;
  return (centered / (std::sqrt(var) + 1e-8)).matrix();
}

}  // namespace forcelab::rl
