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

#ifndef FORCELAB_ADAM_H_
#define FORCELAB_ADAM_H_

#include <stdexcept>

#include <Eigen/Core>

namespace forcelab::nn {

class NonFiniteGradientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AdamConfig {
  double learning_rate = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long long step = 0;

  AdamState() = default;
  explicit AdamState(Eigen::Index n)
      : m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)) {}
};

// Bias-corrected Adam. Throws NonFiniteGradientError before touching any
// state when the gradient contains NaN or Inf.
void adam_step(AdamState& state, const AdamConfig& config,
               Eigen::VectorXd& params, const Eigen::VectorXd& grads);

}  // namespace forcelab::nn

#endif  // FORCELAB_ADAM_H_
