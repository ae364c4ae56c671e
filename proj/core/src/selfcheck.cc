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

#include "forcelab/selfcheck.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "forcelab/checkpoint.h"
#include "forcelab/gae.h"
#include "forcelab/mlp.h"
#include "forcelab/quasistatics.h"
#include "forcelab/trainer.h"

namespace forcelab {
namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

CheckResult check_worked_values() {
  statics::BodyGeometry g;
  g.total_mass = 343.35 / 9.81;
  const double f_half = g.weight() * g.com_distance / (2.0 * g.ee_distance);
  const double beta = statics::expected_tilt(g, {f_half, 0.0, 1}, 0.9).beta;
  const double fmax = statics::max_interactive_force(g, 0.0, 0.9);
  const double err = std::abs(beta - std::numbers::pi / 3.0);
  return {"statics.worked_values", err < 1e-9 && std::abs(fmax - 96.05) < 0.01,
          "|beta - pi/3| = " + fmt(err) + ", F_max = " + fmt(fmax) + " N"};
}

CheckResult check_round_trip(const RunConfig& c) {
  double worst = 0.0;
  for (double lim : {0.3, 0.6, 0.9, 1.2}) {
    for (double alpha : {0.0, 0.3, 0.6}) {
      const double f = statics::max_interactive_force(c.sim.geometry, alpha, lim);
      const double b = statics::expected_tilt(c.sim.geometry, {f, alpha, 1}, lim).beta;
      worst = std::max(worst, std::abs(b - lim));
    }
  }
  return {"statics.round_trip", worst < 1e-9, "max error " + fmt(worst) + " rad"};
}

CheckResult check_sim_zmp(const RunConfig& c) {
  sim::Env env(c.sim);
  env.reset(c.seed, 1);
  double worst = 0.0;
  for (double f : {0.0, 20.0, 60.0}) {
    for (int dir : {-1, 1}) {
      const statics::HandForce hf{f, 0.2, dir};
      const sim::BodyPose& p = env.pose();
      const double expected = statics::zmp_location(c.sim.geometry, hf, p.com.x(), p.hand.y(),
                                                    p.hand.x());
      worst = std::max(worst, std::abs(env.zmp_of_pose(hf) - expected));
    }
  }
  return {"sim.zmp_matches_statics", worst < 1e-9, "max error " + fmt(worst) + " m"};
}

CheckResult check_gae_hand_case(const RunConfig& c) {
  const std::vector<double> r{1.0, 1.0};
  const std::vector<double> v{0.5, 0.5, 0.0};
  const std::vector<std::uint8_t> d{0, 1};
  const rl::GaeResult g = rl::compute_gae(r, v, d, 0.98, 0.95);
  const double err = std::abs(g.advantages[0] - 1.4555) + std::abs(g.advantages[1] - 0.5);
  (void)c;
  return {"rl.gae_hand_case", err < 1e-12,
          "A = [" + fmt(g.advantages[0]) + ", " + fmt(g.advantages[1]) + "]"};
}

CheckResult check_gradients(const RunConfig& c) {
  Rng rng(derive_seed(c.seed, 0xC4EC));
  double worst = 0.0;
  for (int n = 0; n < 5; ++n) {
    nn::Mlp net({3, 5, 4, 2}, rng, 1.0);
    Eigen::MatrixXd x(3, 4);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.normal();
    auto loss = [&](const nn::Mlp& m) { return 0.5 * m.forward(x).squaredNorm(); };
    nn::Mlp::Cache cache;
    const Eigen::MatrixXd y = net.forward(x, &cache);
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.num_params()));
    net.backward(cache, y, grad);
    for (Eigen::Index k = 0; k < grad.size(); ++k) {
      nn::Mlp probe = net;
      Eigen::VectorXd p = net.params();
      const double h = 1e-6;
      p(k) += h;
      probe.set_params(p);
      const double up = loss(probe);
      p(k) -= 2.0 * h;
      probe.set_params(p);
      const double down = loss(probe);
      const double fd = (up - down) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - grad(k)) / std::max(1e-6, std::abs(fd) + std::abs(grad(k))));
    }
  }
  return {"nn.gradient_check", worst < 1e-4, "max relative error " + fmt(worst)};
}

train::TrainConfig tiny_train(const RunConfig& c) {
  train::TrainConfig t = c.train;
  t.num_envs = 4;
  t.rollout_length = 16;
  t.hidden_layers = {16, 16};
  t.num_minibatches = 2;
  t.epochs = 2;
  return t;
}

CheckResult check_loss_identity(const RunConfig& c) {
  train::Trainer trainer(tiny_train(c), c.sim, c.seed);
  double worst = 0.0;
  for (int i = 0; i < 2; ++i) {
    const train::IterationLog log = trainer.run_iteration();
    double sum = c.train.reg_coef * log.update.regularizer;
    for (double l : log.update.agent_loss) sum += l;
    worst = std::max(worst, std::abs(sum - log.update.total_loss));
  }
  return {"train.loss_identity", worst < 1e-12, "max |total - sum| = " + fmt(worst)};
}

CheckResult check_resume(const RunConfig& c) {
  const train::TrainConfig t = tiny_train(c);
  train::Trainer straight(t, c.sim, c.seed);
  for (int i = 0; i < 2; ++i) straight.run_iteration();
  train::Trainer first(t, c.sim, c.seed);
  first.run_iteration();
  const Json saved = checkpoint_to_json(make_checkpoint(first, "selfcheck"));
  train::Trainer second(t, c.sim, c.seed ^ 0x5A5A);
  restore_trainer(second, checkpoint_from_json(Json::parse(saved.dump())));
  second.run_iteration();
  const bool same = bundle_to_json(second.bundle()) == bundle_to_json(straight.bundle()) &&
                    second.state_json() == straight.state_json();
  return {"train.split_resume_bit_exact", same, same ? "identical" : "diverged"};
}

}  // namespace

std::vector<CheckResult> run_selfcheck(const RunConfig& config) {
  std::vector<CheckResult> out;
  auto guarded = [&](const char* name, auto fn) {
    try {
      out.push_back(fn());
    } catch (const std::exception& e) {
      out.push_back({name, false, std::string("threw: ") + e.what()});
    }
  };
  guarded("statics.worked_values", [] { return check_worked_values(); });
  guarded("statics.round_trip", [&] { return check_round_trip(config); });
  guarded("sim.zmp_matches_statics", [&] { return check_sim_zmp(config); });
  guarded("rl.gae_hand_case", [&] { return check_gae_hand_case(config); });
  guarded("nn.gradient_check", [&] { return check_gradients(config); });
  guarded("train.loss_identity", [&] { return check_loss_identity(config); });
  guarded("train.split_resume_bit_exact", [&] { return check_resume(config); });
  return out;
}

}  // namespace forcelab
