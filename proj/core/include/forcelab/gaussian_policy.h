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

#ifndef FORCELAB_GAUSSIAN_POLICY_H_
#define FORCELAB_GAUSSIAN_POLICY_H_

#include <vector>

#include <Eigen/Core>

#include "forcelab/mlp.h"
#include "forcelab/rng.h"

namespace forcelab::nn {

inline constexpr double kLogStdMin = -4.0;
inline constexpr double kLogStdMax = 1.0;

// Diagonal Gaussian policy: state-dependent mean from an MLP and a
// state-independent learnable log standard deviation.
class GaussianPolicy {
 public:
  GaussianPolicy() = default;
  GaussianPolicy(std::vector<int> widths, Rng& rng, double init_log_std,
                 double output_gain = 0.01);
  GaussianPolicy(Mlp mean_net, Eigen::VectorXd log_std);

  int action_dim() const { return net_.output_size(); }
  int obs_dim() const { return net_.input_size(); }
  const Mlp& mean_net() const { return net_; }
  Mlp& mean_net() { return net_; }

  const Eigen::VectorXd& log_std() const { return log_std_; }
  // Stored clamped to [kLogStdMin, kLogStdMax].
  void set_log_std(const Eigen::VectorXd& v);
  Eigen::VectorXd stddev() const { return log_std_.array().exp(); }

  Eigen::MatrixXd mean(const Eigen::MatrixXd& obs, Mlp::Cache* cache = nullptr) const {
    return net_.forward(obs, cache);
  }
  // Per-column log density of `actions` under N(mean, diag(std^2)).
  Eigen::VectorXd log_prob(const Eigen::MatrixXd& mean,
                           const Eigen::MatrixXd& actions) const;
  // Closed-form entropy (identical for every state).
  double entropy() const;
  Eigen::VectorXd sample(const Eigen::VectorXd& mean, Rng& rng) const;

  // Flat parameter view: mean-network parameters followed by log_std.
  std::size_t num_params() const { return net_.num_params() + log_std_.size(); }
  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& p);

 private:
  Mlp net_;
  Eigen::VectorXd log_std_;
};

struct LogProbEntropy {
  Eigen::VectorXd log_prob;
  double entropy = 0.0;
};

LogProbEntropy log_prob_and_entropy(const GaussianPolicy& policy,
                                    const Eigen::MatrixXd& obs,
                                    const Eigen::MatrixXd& actions);

}  // namespace forcelab::nn

#endif  // FORCELAB_GAUSSIAN_POLICY_H_
