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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "forcelab/gae.h"
#include "forcelab/ppo.h"
#include "oracles.h"

namespace forcelab::rl {
namespace {

TEST(Gae, HandCase) {
  // T = 2, r = [1, 1], V = [0.5, 0.5], terminal after step 2.
  const GaeResult g = compute_gae(std::vector<double>{1.0, 1.0},
                                  std::vector<double>{0.5, 0.5, 123.0},
                                  std::vector<std::uint8_t>{0, 1}, 0.98, 0.95);
  EXPECT_NEAR(g.advantages[0], 1.4555, 1e-12);
  EXPECT_NEAR(g.advantages[1], 0.5, 1e-12);
  EXPECT_NEAR(g.returns[0], 1.9555, 1e-12);
}

TEST(Gae, MatchesBruteForceOnRandomTrajectories) {
  Rng rng(77);
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const int t_len = 1 + static_cast<int>(rng.uniform() * 64.0);
    std::vector<double> r(t_len);
    std::vector<double> v(t_len + 1);
    std::vector<std::uint8_t> d(t_len);
    for (int t = 0; t < t_len; ++t) {
      r[t] = rng.normal();
      v[t] = rng.normal();
      d[t] = rng.uniform() < 0.1 ? 1 : 0;
    }
    v[t_len] = rng.normal();
    const double gamma = rng.uniform(0.5, 1.0);
    const double lambda = rng.uniform(0.0, 1.0);
    const GaeResult g = compute_gae(r, v, d, gamma, lambda);
    const std::vector<double> want = oracle::gae_brute_force(r, v, d, gamma, lambda);
    for (int t = 0; t < t_len; ++t) {
      worst = std::max(worst, std::abs(g.advantages[t] - want[t]));
      EXPECT_DOUBLE_EQ(g.returns[t], g.advantages[t] + v[t]);
    }
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(Gae, LambdaZeroIsOneStepTd) {
  const std::vector<double> r{1.0, 2.0, 3.0};
  const std::vector<double> v{0.1, 0.2, 0.3, 0.4};
  const GaeResult g = compute_gae(r, v, std::vector<std::uint8_t>{0, 0, 0}, 0.9, 0.0);
  for (int t = 0; t < 3; ++t) EXPECT_NEAR(g.advantages[t], r[t] + 0.9 * v[t + 1] - v[t], 1e-15);
}

TEST(Gae, RejectsInconsistentLengths) {
  EXPECT_THROW(compute_gae(std::vector<double>{1.0}, std::vector<double>{1.0},
                           std::vector<std::uint8_t>{0}, 0.9, 0.9),
               std::invalid_argument);
}

TEST(Surrogate, ClippingCases) {
  EXPECT_DOUBLE_EQ(clipped_surrogate(1.0, 2.0, 0.2), 2.0);
  EXPECT_DOUBLE_EQ(clipped_surrogate(1.5, 2.0, 0.2), 1.2 * 2.0);
  EXPECT_DOUBLE_EQ(clipped_surrogate(0.5, 2.0, 0.2), 0.5 * 2.0);
  EXPECT_DOUBLE_EQ(clipped_surrogate(1.5, -2.0, 0.2), 1.5 * -2.0);
  EXPECT_DOUBLE_EQ(clipped_surrogate(0.5, -2.0, 0.2), 0.8 * -2.0);
}

TEST(Advantages, NormalizedToZeroMeanUnitStd) {
  Eigen::VectorXd a(5);
  a << 1.0, 2.0, 3.0, 4.0, 10.0;
  const Eigen::VectorXd n = normalize_advantages(a);
  EXPECT_NEAR(n.mean(), 0.0, 1e-14);
  EXPECT_NEAR(std::sqrt((n.array() - n.mean()).square().sum() / 4.0), 1.0, 1e-8);
}

TEST(Regularizer, ValueAndGradient) {
  Eigen::MatrixXd a(2, 4);
  a << 1, 2, 3, 4, -1, 0, 0.5, 2;
  Eigen::MatrixXd b(1, 4);
  b << 0.5, 0.5, -1, 1;
  const std::vector<Eigen::MatrixXd> agents{a, b};
  EXPECT_NEAR(torque_regularizer(agents), (a.squaredNorm() + b.squaredNorm()) / 4.0, 1e-14);
  const RegularizerShare s = action_regularizer_share(a);
  EXPECT_NEAR(s.value, a.squaredNorm() / 4.0, 1e-14);
  EXPECT_TRUE(s.grad_mean.isApprox(0.5 * a, 1e-14));
  EXPECT_THROW(torque_regularizer(std::vector<Eigen::MatrixXd>{a, Eigen::MatrixXd(1, 3)}),
               std::invalid_argument);
}

struct LossFixture {
  nn::GaussianPolicy actor;
  nn::Mlp critic;
  Minibatch mb;
  PpoCoefficients coef{0.2, 0.9, 0.02};
};

LossFixture make_fixture(std::uint64_t seed) {
  Rng rng(seed);
  LossFixture f;
  f.actor = nn::GaussianPolicy({4, 6, 2}, rng, -0.5, 1.0);
  f.critic = nn::Mlp({5, 6, 1}, rng, 1.0);
  const int b = 12;
  f.mb.actor_obs.resize(4, b);
  f.mb.critic_obs.resize(5, b);
  f.mb.actions.resize(2, b);
  for (Eigen::Index i = 0; i < f.mb.actor_obs.size(); ++i) f.mb.actor_obs(i) = rng.normal();
  for (Eigen::Index i = 0; i < f.mb.critic_obs.size(); ++i) f.mb.critic_obs(i) = rng.normal();
  const Eigen::MatrixXd mean = f.actor.mean(f.mb.actor_obs);
  for (Eigen::Index i = 0; i < f.mb.actions.size(); ++i) {
    f.mb.actions(i) = mean(i) + 0.5 * rng.normal();
  }
  // Old log-probabilities a little off the current ones so that some
  // samples sit in the clipped region and some do not.
  f.mb.old_log_prob = f.actor.log_prob(mean, f.mb.actions);
  for (Eigen::Index i = 0; i < b; ++i) f.mb.old_log_prob(i) += 0.4 * rng.normal();
  f.mb.advantages.resize(b);
  f.mb.returns.resize(b);
  for (Eigen::Index i = 0; i < b; ++i) {
    f.mb.advantages(i) = rng.normal();
    f.mb.returns(i) = rng.normal();
  }
  return f;
}

TEST(AgentLoss, GradientsMatchFiniteDifferences) {
  const double reg_coef = 0.3;
  const RegularizerFn reg = [](const Eigen::MatrixXd& m, const Minibatch&) {
    return action_regularizer_share(m);
  };
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    LossFixture f = make_fixture(seed);
    const AgentLossResult res = agent_loss(f.mb, f.actor, f.critic, f.coef, reg_coef, &reg);
    ASSERT_TRUE(res.finite);
    auto actor_objective = [&](const Eigen::VectorXd& p) {
      nn::GaussianPolicy a = f.actor;
      a.set_parameters(p);
      const AgentLossResult r = agent_loss(f.mb, a, f.critic, f.coef, reg_coef, &reg);
      return r.loss() + reg_coef * r.regularizer;
    };
    auto critic_objective = [&](const Eigen::VectorXd& p) {
      nn::Mlp c = f.critic;
      c.set_params(p);
      return agent_loss(f.mb, f.actor, c, f.coef).loss();
    };
    EXPECT_LT(oracle::relative_error(res.actor_grad,
                                     oracle::numeric_gradient(actor_objective, f.actor.parameters())),
              1e-5);
    EXPECT_LT(oracle::relative_error(res.critic_grad,
                                     oracle::numeric_gradient(critic_objective, f.critic.params())),
              1e-6);
  }
}

TEST(AgentLoss, ObjectiveDecomposition) {
  LossFixture f = make_fixture(9);
  const AgentLossResult r = agent_loss(f.mb, f.actor, f.critic, f.coef);
  EXPECT_NEAR(r.objective,
              r.surrogate - f.coef.value_coef * r.value_loss + f.coef.entropy_coef * r.entropy,
              1e-14);
  EXPECT_DOUBLE_EQ(r.loss(), -r.objective);
  EXPECT_DOUBLE_EQ(r.entropy, f.actor.entropy());
  EXPECT_GE(r.clip_fraction, 0.0);
  EXPECT_LE(r.clip_fraction, 1.0);
  EXPECT_GE(r.approx_kl, 0.0);
}

TEST(AgentLoss, OnPolicyRatioIsOne) {
  LossFixture f = make_fixture(10);
  f.mb.old_log_prob = f.actor.log_prob(f.actor.mean(f.mb.actor_obs), f.mb.actions);
  const AgentLossResult r = agent_loss(f.mb, f.actor, f.critic, f.coef);
  EXPECT_NEAR(r.surrogate, f.mb.advantages.mean(), 1e-12);
  EXPECT_EQ(r.clip_fraction, 0.0);
  EXPECT_NEAR(r.approx_kl, 0.0, 1e-15);
}

TEST(AgentLoss, NonFiniteRatioIsFlagged) {
  LossFixture f = make_fixture(11);
  f.mb.old_log_prob(0) = -1e6;
  EXPECT_FALSE(agent_loss(f.mb, f.actor, f.critic, f.coef).finite);
}

}  // namespace
}  // namespace forcelab::rl
