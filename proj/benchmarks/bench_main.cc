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

#include <vector>

#include <benchmark/benchmark.h>

#include "forcelab/gae.h"
#include "forcelab/mlp.h"
#include "forcelab/quasistatics.h"
#include "forcelab/rng.h"
#include "forcelab/sim.h"
#include "forcelab/trainer.h"

namespace {

using namespace forcelab;

void BM_MlpForwardBackward(benchmark::State& state) {
  Rng rng(1);
  const nn::Mlp net({sim::kCriticInputSize, 128, 64, 32, 1}, rng, 1.0);
  const int batch = static_cast<int>(state.range(0));
  Eigen::MatrixXd x(sim::kCriticInputSize, batch);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.normal();
  const Eigen::MatrixXd up = Eigen::MatrixXd::Ones(1, batch);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.num_params()));
  for (auto _ : state) {
    nn::Mlp::Cache cache;
    benchmark::DoNotOptimize(net.forward(x, &cache));
    benchmark::DoNotOptimize(net.backward(cache, up, grad));
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_MlpForwardBackward)->Arg(1)->Arg(256)->Arg(1024);

void BM_SimStep(benchmark::State& state) {
  sim::Env env(sim::SimConfig{});
  env.reset(3, 2);
  const std::vector<double> action(sim::kNumJoints, 0.0);
  std::uint64_t seed = 3;
  for (auto _ : state) {
    if (env.step(action).done) env.reset(++seed, 2);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SimStep);

void BM_Gae(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(2);
  std::vector<double> r(n), v(n + 1);
  std::vector<std::uint8_t> d(n);
  for (int i = 0; i < n; ++i) {
    r[i] = rng.normal();
    v[i] = rng.normal();
    d[i] = rng.uniform() < 0.01 ? 1 : 0;
  }
  v[n] = 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(rl::compute_gae(r, v, d, 0.98, 0.95));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Gae)->Arg(64)->Arg(4096);

void BM_ExpectedTilt(benchmark::State& state) {
  const statics::BodyGeometry g;
  double f = 0.0;
  for (auto _ : state) {
    f = f > 150.0 ? 0.0 : f + 0.37;
    benchmark::DoNotOptimize(statics::expected_tilt(g, {f, 0.1, 1}, 0.9));
  }
}
BENCHMARK(BM_ExpectedTilt);

void BM_TrainIteration(benchmark::State& state) {
  train::TrainConfig c;
  c.num_envs = 16;
  c.rollout_length = 32;
  train::Trainer trainer(c, sim::SimConfig{}, 5);
  for (auto _ : state) benchmark::DoNotOptimize(trainer.run_iteration());
}
BENCHMARK(BM_TrainIteration)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
