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

#include "forcelab/mlp.h"

#include <atomic>
#include <cmath>
#include <string>

#include <Eigen/QR>

namespace forcelab::nn {
namespace {

std::uint64_t next_generation() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

Eigen::MatrixXd orthogonal(int rows, int cols, Rng& rng, double gain) {
  const int n = std::max(rows, cols);
  const int m = std::min(rows, cols);
  Eigen::MatrixXd a(n, m);
  for (int c = 0; c < m; ++c) {
    for (int r = 0; r < n; ++r) a(r, c) = rng.normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, m);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(m);
  for (int c = 0; c < m; ++c) {
    if (r(c, c) < 0.0) q.col(c) *= -1.0;
  }
  Eigen::MatrixXd w = rows >= cols ? q : Eigen::MatrixXd(q.transpose());
  return gain * w;
}

}  // namespace

Mlp::Mlp(std::vector<int> widths) : widths_(std::move(widths)) {
  if (widths_.size() < 2) throw ShapeError("an MLP needs at least two widths");
  Eigen::Index offset = 0;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    if (widths_[l] <= 0 || widths_[l + 1] <= 0) {
      throw ShapeError("layer widths must be positive");
    }
    weight_offset_.push_back(offset);
    offset += static_cast<Eigen::Index>(widths_[l]) * widths_[l + 1];
    bias_offset_.push_back(offset);
    offset += widths_[l + 1];
  }
  params_ = Eigen::VectorXd::Zero(offset);
  touch();
}

Mlp::Mlp(std::vector<int> widths, Rng& rng, double output_gain)
    : Mlp(std::move(widths)) {
  for (int l = 0; l < num_layers(); ++l) {
    const bool last = l + 1 == num_layers();
    mutable_weight(l) = orthogonal(widths_[l + 1], widths_[l], rng,
                                   last ? output_gain : std::sqrt(2.0));
  }
  touch();
}

Mlp Mlp::zeros(std::vector<int> widths) { return Mlp(std::move(widths)); }

void Mlp::touch() { generation_ = next_generation(); }

void Mlp::set_params(const Eigen::VectorXd& p) {
  if (p.size() != params_.size()) {
    throw ShapeError("parameter vector has " + std::to_string(p.size()) +
                     " entries, expected " + std::to_string(params_.size()));
  }
  params_ = p;
  touch();
}

Eigen::Map<const Eigen::MatrixXd> Mlp::weight(int layer) const {
  return {params_.data() + weight_offset_[layer], widths_[layer + 1], widths_[layer]};
}

Eigen::Map<const Eigen::VectorXd> Mlp::bias(int layer) const {
  return {params_.data() + bias_offset_[layer], widths_[layer + 1]};
}

Eigen::Map<Eigen::MatrixXd> Mlp::mutable_weight(int layer) {
  touch();
  return {params_.data() + weight_offset_[layer], widths_[layer + 1], widths_[layer]};
}

Eigen::Map<Eigen::VectorXd> Mlp::mutable_bias(int layer) {
  touch();
  return {params_.data() + bias_offset_[layer], widths_[layer + 1]};
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, Cache* cache) const {
  if (x.rows() != input_size()) {
    throw ShapeError("input has " + std::to_string(x.rows()) + " rows, expected " +
                     std::to_string(input_size()));
  }
  if (cache) {
    cache->activations.clear();
    cache->activations.push_back(x);
    cache->generation = generation_;
  }
  Eigen::MatrixXd a = x;
  for (int l = 0; l < num_layers(); ++l) {
    Eigen::MatrixXd z = weight(l) * a;
    z.colwise() += bias(l);
    // tanh via exp: Eigen vectorizes exp but not tanh for doubles.
    if (l + 1 < num_layers()) z = (1.0 - 2.0 / ((2.0 * z.array()).exp() + 1.0)).matrix();
    a = std::move(z);
    if (cache) cache->activations.push_back(a);
  }
  return a;
}

Eigen::MatrixXd Mlp::backward(const Cache& cache, const Eigen::MatrixXd& upstream,
                              Eigen::VectorXd& grad) const {
  if (cache.activations.size() != widths_.size() || cache.generation != generation_) {
    throw std::logic_error("stale or missing forward cache");
  }
  if (upstream.rows() != output_size() ||
      upstream.cols() != cache.activations.back().cols()) {
    throw ShapeError("upstream gradient shape does not match the forward batch");
  }
  if (grad.size() != params_.size()) grad = Eigen::VectorXd::Zero(params_.size());
  Eigen::MatrixXd g = upstream;
  for (int l = num_layers() - 1; l >= 0; --l) {
    if (l + 1 < num_layers()) {
      const Eigen::MatrixXd& out = cache.activations[l + 1];
      g.array() *= (1.0 - out.array().square());
    }
    const Eigen::MatrixXd& in = cache.activations[l];
    Eigen::Map<Eigen::MatrixXd> dw(grad.data() + weight_offset_[l], widths_[l + 1], widths_[l]);
    Eigen::Map<Eigen::VectorXd> db(grad.data() + bias_offset_[l], widths_[l + 1]);
    dw.noalias() += g * in.transpose();
    db += g.rowwise().sum();
    g = weight(l).transpose() * g;
  }
  return g;
}

}  // namespace forcelab::nn
