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

#ifndef FORCELAB_MLP_H_
#define FORCELAB_MLP_H_

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "forcelab/rng.h"

namespace forcelab::nn {

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Dense tanh MLP with an identity output layer. Parameters live in one flat
// vector in declared layer order: W0 (out x in, column-major), b0, W1, b1, ...
// Batches are column-major: one sample per column.
class Mlp {
 public:
  struct Cache {
    std::vector<Eigen::MatrixXd> activations;  // input, then each layer output
    std::uint64_t generation = 0;
  };

  Mlp() = default;
  // Orthogonal init for every layer (gain sqrt(2) on hidden layers,
  // output_gain on the last), zero biases.
  Mlp(std::vector<int> widths, Rng& rng, double output_gain);
  // All parameters zero.
  static Mlp zeros(std::vector<int> widths);

  const std::vector<int>& widths() const { return widths_; }
  int num_layers() const { return static_cast<int>(widths_.size()) - 1; }
  int input_size() const { return widths_.front(); }
  int output_size() const { return widths_.back(); }
  std::size_t num_params() const { return static_cast<std::size_t>(params_.size()); }

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Cache* cache = nullptr) const;

  // Reverse pass for the batch recorded in `cache`. Accumulates parameter
  // gradients into `grad` and returns the gradient w.r.t. the input batch.
  // Throws std::logic_error if the cache predates a parameter change.
  Eigen::MatrixXd backward(const Cache& cache, const Eigen::MatrixXd& upstream,
                           Eigen::VectorXd& grad) const;

  const Eigen::VectorXd& params() const { return params_; }
  void set_params(const Eigen::VectorXd& p);

  Eigen::Map<const Eigen::MatrixXd> weight(int layer) const;
  Eigen::Map<const Eigen::VectorXd> bias(int layer) const;
  Eigen::Map<Eigen::MatrixXd> mutable_weight(int layer);
  Eigen::Map<Eigen::VectorXd> mutable_bias(int layer);

 private:
  explicit Mlp(std::vector<int> widths);
  void touch();

  std::vector<int> widths_;
  std::vector<Eigen::Index> weight_offset_;
  std::vector<Eigen::Index> bias_offset_;
  Eigen::VectorXd params_;
  std::uint64_t generation_ = 0;
};

}  // namespace forcelab::nn

#endif  // FORCELAB_MLP_H_
