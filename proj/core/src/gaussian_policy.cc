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

#include "forcelab/gaussian_policy.h"

#include <cmath>
#include <numbers>

namespace forcelab::nn {
namespace {

const double kHalfLogTwoPi = 0.5 * std::log(2.0 * std::numbers::pi);

}  // namespace

GaussianPolicy::GaussianPolicy(std::vector<int> widths, Rng& rng,
                               double init_log_std, double output_gain)
    : net_(std::move(widths), rng, output_gain) {
  set_log_std(Eigen::VectorXd::Constant(net_.output_size(), init_log_std));
}

GaussianPolicy::GaussianPolicy(Mlp mean_net, Eigen::VectorXd log_std)
    : net_(std::move(mean_net)) {
  if (log_std.size() != net_.output_size()) {
    throw ShapeError("log_std size must equal the action dimension");
  }
  set_log_std(log_std);
}

void GaussianPolicy::set_log_std(const Eigen::VectorXd& v) {
  if (v.size() != net_.output_size()) {
    throw ShapeError("log_std size must equal the action dimension");
  }
  log_std_ = v.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
}

Eigen::VectorXd GaussianPolicy::log_prob(const Eigen::MatrixXd& mean,
                                         const Eigen::MatrixXd& actions) const {
  if (mean.rows() != action_dim() || actions.rows() != action_dim() ||
      mean.cols() != actions.cols()) {
    throw ShapeError("mean/action batch shape mismatch");
  }
  const Eigen::ArrayXd inv_std = (-log_std_).array().exp();
  const double norm = log_std_.sum() + action_dim() * kHalfLogTwoPi;
  Eigen::VectorXd out(actions.cols());
  for (Eigen::Index c = 0; c < actions.cols(); ++c) {
    const Eigen::ArrayXd z = (actions.col(c) - mean.col(c)).array() * inv_std;
    out(c) = -0.5 * z.square().sum() - norm;
  }
  return out;
}

double GaussianPolicy::entropy() const {
  return log_std_.sum() + action_dim() * (0.5 + kHalfLogTwoPi);
}

Eigen::VectorXd GaussianPolicy::sample(const Eigen::VectorXd& mean, Rng& rng) const {
  Eigen::VectorXd a(mean.size());
  for (Eigen::Index k = 0; k < mean.size(); ++k) {
    a(k) = mean(k) + std::exp(log_std_(k)) * rng.normal();
  }
  return a;
}

Eigen::VectorXd GaussianPolicy::parameters() const {
  Eigen::VectorXd p(num_params());
  p << net_.params(), log_std_;
  return p;
}

void GaussianPolicy::set_parameters(const Eigen::VectorXd& p) {
  if (static_cast<std::size_t>(p.size()) != num_params()) {
    throw ShapeError("policy parameter vector has the wrong size");
  }
  net_.set_params(p.head(net_.num_params()));
  set_log_std(p.tail(log_std_.size()));
}

LogProbEntropy log_prob_and_entropy(const GaussianPolicy& policy,
                                    const Eigen::MatrixXd& obs,
                                    const Eigen::MatrixXd& actions) {
  LogProbEntropy out;
  out.log_prob = policy.log_prob(policy.mean(obs), actions);
  out.entropy = policy.entropy();
  return out;
}

}  // namespace forcelab::nn
