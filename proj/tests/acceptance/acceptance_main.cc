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

// Acceptance gate: one PASS/FAIL line per criterion. Tolerances and training
// budgets are pinned below; the exit code is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "CLI11.hpp"
#include "forcelab/checkpoint.h"
#include "forcelab/commands.h"
#include "forcelab/config.h"
#include "forcelab/eval.h"
#include "forcelab/gae.h"
#include "forcelab/mlp.h"
#include "forcelab/quasistatics.h"
#include "forcelab/rng.h"
#include "forcelab/sim.h"
#include "forcelab/trainer.h"
#include "oracles.h"

namespace {

using namespace forcelab;
namespace fs = std::filesystem;

constexpr double kPi = std::numbers::pi;

// Pinned tolerances.
constexpr double kRoundTripTol = 1e-9;       // rad
constexpr double kApproxBound = 0.05;        // rad
constexpr double kStaticsSeconds = 10.0;
constexpr double kWorkedBetaTol = 1e-9;      // rad
constexpr double kWorkedFmax = 96.05;        // N
constexpr double kWorkedFmaxTol = 0.01;      // N
constexpr double kGradTol = 1e-4;
constexpr int kGradNets = 100;
constexpr double kGradSeconds = 60.0;
constexpr double kGaeTol = 1e-10;
constexpr int kGaeTrajectories = 1000;
constexpr double kHandCaseTol = 5e-5;        // quoted to four decimals
constexpr double kLossTol = 1e-12;
constexpr double kZmpTol = 1e-9;             // m
constexpr double kStandFraction = 0.9;
constexpr int kStandIterations = 300;
constexpr double kStandSeconds = 15.0 * 60.0;
constexpr double kSpearmanMax = -0.8;
constexpr double kTiltMaeMax = 0.15;         // rad
constexpr double kSweepSeconds = 2.0 * 3600.0;
constexpr int kAblationSeeds = 5;

// Pinned training budget for the behavioral criteria; mirrors
// configs/desk_budget.json.
train::TrainConfig behavior_budget() {
  train::TrainConfig c;
  c.iterations = 600;
  c.curriculum_switch = 200;
  c.reg_coef = 0.05;
  return c;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

statics::BodyGeometry worked_geometry() {
  statics::BodyGeometry g;
  g.total_mass = 343.35 / 9.81;
  g.gravity_accel = 9.81;
  g.com_distance = 0.45;
  g.ee_distance = 1.0;
  return g;
}

// Root of the full moment balance on [beta_lim, pi/2], clamped at the limit.
double solve_full(const statics::BodyGeometry& g, const statics::HandForce& f,
                  double ee_horizontal, double beta_lim) {
  auto r = [&](double b) {
    return statics::torque_residual_full(g, f, b, g.ee_distance, ee_horizontal);
  };
  double lo = beta_lim;
  double hi = kPi / 2.0;
  if (r(lo) >= 0.0) return beta_lim;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (r(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Outcome statics_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  statics::BodyGeometry g;
  double round_trip = 0.0;
  for (double lim = 0.1; lim < 1.5; lim += 0.1) {
    for (double alpha = 0.0; alpha < 1.2; alpha += 0.2) {
      for (double phi : {0.0, 0.15, 0.3}) {
        g.ee_offset_angle = phi;
        const double f = statics::max_interactive_force(g, alpha, lim);
        round_trip = std::max(
            round_trip, std::abs(statics::expected_tilt(g, {f, alpha, 1}, lim).beta - lim));
      }
    }
  }
  g = statics::BodyGeometry{};
  double approx = 0.0;
  const double fmax = statics::max_interactive_force(g, 0.0, 0.9);
  for (double f = 0.0; f <= 1.5 * fmax; f += fmax / 40.0) {
    for (double alpha = 0.0; alpha <= kPi / 4.0 + 1e-12; alpha += kPi / 40.0) {
      for (double d3 = 0.0; d3 <= 0.05 * g.ee_distance + 1e-12; d3 += 0.01 * g.ee_distance) {
        const statics::HandForce hf{f, alpha, 1};
        approx = std::max(approx, std::abs(solve_full(g, hf, d3, 0.9) -
                                           statics::expected_tilt(g, hf, 0.9).beta));
      }
    }
  }
  double zmp_err = 0.0;
  bool affine = true;
  bool signs = true;
  for (double f : {0.0, 20.0, 55.0}) {
    for (double alpha : {0.0, 0.4}) {
      for (int dir : {-1, 1}) {
        const statics::HandForce hf{f, alpha, dir};
        const double z0 = statics::zmp_location(g, hf, 0.0, 0.95, 0.1);
        const double z1 = statics::zmp_location(g, hf, 0.05, 0.95, 0.1);
        const double z2 = statics::zmp_location(g, hf, 0.10, 0.95, 0.1);
        affine = affine && std::abs((z2 - z1) - (z1 - z0)) < 1e-14;
        zmp_err = std::max(zmp_err, std::abs(z0 - oracle::zmp(g.weight(), 0.0, 0.1, 0.95,
                                                              hf.horizontal(), hf.vertical())));
      }
    }
    if (f > 0.0) {
      signs = signs && statics::zmp_location(g, {f, 0.0, 1}, 0.0, 1.0) > 0.0 &&
              statics::zmp_location(g, {f, 0.0, -1}, 0.0, 1.0) < 0.0;
    }
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = round_trip <= kRoundTripTol && approx <= kApproxBound && zmp_err < 1e-12 &&
           affine && signs && secs < kStaticsSeconds;
  o.detail = "round trip " + fmt("%.2e", round_trip) + " rad, approximation gap " +
             fmt("%.4f", approx) + " rad, zmp oracle " + fmt("%.1e", zmp_err) + " m, affine " +
             (affine ? "yes" : "no") + ", signs " + (signs ? "ok" : "wrong") + ", " +
             fmt("%.2f", secs) + " s";
  return o;
}

Outcome worked_values() {
  const statics::BodyGeometry g = worked_geometry();
  // 77.254 N is m g |r_CoM| / 2 = 77.25375 N rounded to three decimals.
  const double exact = 343.35 * 0.45 / 2.0;
  const double beta = statics::expected_tilt(g, {exact, 0.0, 1}, 0.9).beta;
  const double beta_quoted = statics::expected_tilt(g, {77.254, 0.0, 1}, 0.9).beta;
  const double fmax = statics::max_interactive_force(g, 0.0, 0.9);
  const double oracle_fmax = oracle::force_at_tilt(0.9, 343.35, 0.45, 1.0, 0.0, 0.0);
  Outcome o;
  o.pass = std::abs(beta - kPi / 3.0) <= kWorkedBetaTol &&
           std::abs(fmax - kWorkedFmax) <= kWorkedFmaxTol && std::abs(fmax - oracle_fmax) < 1e-9;
  o.detail = "|beta - pi/3| = " + fmt("%.2e", std::abs(beta - kPi / 3.0)) + " at F = " +
             fmt("%.5f", exact) + " N (" + fmt("%.2e", std::abs(beta_quoted - kPi / 3.0)) +
             " at 77.254 N), F_max = " + fmt("%.4f", fmax) + " N";
  return o;
}

Outcome gradient_check() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(77);
  double worst = 0.0;
  for (int n = 0; n < kGradNets; ++n) {
    std::vector<int> widths{1 + static_cast<int>(rng.uniform(0, 5))};
    const int hidden = 1 + static_cast<int>(rng.uniform(0, 3));
    for (int h = 0; h < hidden; ++h) widths.push_back(2 + static_cast<int>(rng.uniform(0, 6)));
    widths.push_back(1 + static_cast<int>(rng.uniform(0, 3)));
    nn::Mlp net(widths, rng, 1.0);
    Eigen::MatrixXd x(widths.front(), 3);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.normal();
    Eigen::MatrixXd w(widths.back(), 3);
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = rng.normal();
    auto loss = [&](const Eigen::VectorXd& p) {
      nn::Mlp copy = net;
      copy.set_params(p);
      return (copy.forward(x).array() * w.array()).sum();
    };
    nn::Mlp::Cache cache;
    net.forward(x, &cache);
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(net.params().size());
    net.backward(cache, w, grad);
    worst = std::max(worst, oracle::relative_error(grad,
                                                   oracle::numeric_gradient(loss, net.params())));
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = worst < kGradTol && secs < kGradSeconds;
  o.detail = std::to_string(kGradNets) + " nets, max relative error " + fmt("%.2e", worst) +
             ", " + fmt("%.2f", secs) + " s";
  return o;
}

Outcome gae_equivalence() {
  Rng rng(5);
  double worst = 0.0;
  for (int n = 0; n < kGaeTrajectories; ++n) {
    const int t_len = 1 + static_cast<int>(rng.uniform(0, 64));
    std::vector<double> r(t_len), v(t_len + 1);
    std::vector<std::uint8_t> d(t_len);
    for (int t = 0; t < t_len; ++t) {
      r[t] = rng.normal();
      v[t] = rng.normal();
      d[t] = rng.uniform() < 0.1 ? 1 : 0;
    }
    v[t_len] = rng.normal();
    const double gamma = rng.uniform(0.5, 1.0);
    const double lambda = rng.uniform(0.0, 1.0);
    const rl::GaeResult got = rl::compute_gae(r, v, d, gamma, lambda);
    const std::vector<double> want = oracle::gae_brute_force(r, v, d, gamma, lambda);
    for (int t = 0; t < t_len; ++t) worst = std::max(worst, std::abs(got.advantages[t] - want[t]));
  }
  const std::vector<double> r{1.0, 1.0};
  const std::vector<double> v{0.5, 0.5, 0.0};
  const std::vector<std::uint8_t> d{0, 1};
  const rl::GaeResult hand = rl::compute_gae(r, v, d, 0.98, 0.95);
  const bool hand_ok =
      std::abs(hand.advantages[0] - 1.4555) < kHandCaseTol && std::abs(hand.advantages[1] - 0.5) < 1e-15;
  Outcome o;
  o.pass = worst < kGaeTol && hand_ok;
  o.detail = std::to_string(kGaeTrajectories) + " trajectories, max diff " + fmt("%.2e", worst) +
             ", hand case [" + fmt("%.5f", hand.advantages[0]) + ", " +
             fmt("%.5f", hand.advantages[1]) + "]";
  return o;
}

Outcome loss_identity() {
  train::TrainConfig c;
  c.num_envs = 16;
  c.rollout_length = 32;
  const sim::SimConfig sc;
  train::Trainer trainer(c, sc, 11);
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    const train::IterationLog log = trainer.run_iteration();
    double sum = c.reg_coef * log.update.regularizer;
    for (double l : log.update.agent_loss) sum += l;
    worst = std::max(worst, std::abs(log.update.total_loss - sum));
  }

  c.reg_coef = 0.0;
  train::PolicyBundle joint = train::PolicyBundle::create(c, 3);
  train::VecEnv envs(sc, c.num_envs, 4);
  envs.reset_all(2);
  auto ro = train::collect_rollouts(joint, envs, c.rollout_length);
  train::compute_advantages(ro, c.gamma, c.gae_lambda);
  Rng rng(9);
  const train::MinibatchPlan plan =
      train::make_minibatch_plan(c.num_envs * c.rollout_length, c.epochs, rng);
  const train::PolicyBundle before = joint;
  train::PolicyBundle separate = joint;
  train::total_update(joint, ro, c, sc, plan);
  for (std::size_t k = 0; k < separate.agents.size(); ++k) {
    train::update_single_agent(separate.agents[k], ro[k], c, sc, plan);
  }
  bool identical = true;
  for (std::size_t k = 0; k < joint.agents.size(); ++k) {
    const Eigen::VectorXd a =
        joint.agents[k].actor.parameters() - before.agents[k].actor.parameters();
    const Eigen::VectorXd b =
        separate.agents[k].actor.parameters() - before.agents[k].actor.parameters();
    identical = identical && a == b && !a.isZero() &&
                joint.agents[k].critic.params() == separate.agents[k].critic.params();
  }
  Outcome o;
  o.pass = worst <= kLossTol && identical;
  o.detail = "max |total - sum| = " + fmt("%.2e", worst) + ", zero-coupling deltas " +
             (identical ? "bit-identical" : "differ");
  return o;
}

Outcome sim_statics_equivalence() {
  const sim::SimConfig cfg;
  sim::Env env(cfg);
  env.reset(1, 2);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    sim::JointVector q{};
    for (int j = 0; j < sim::kNumJoints; ++j) {
      const sim::JointSpec& s = cfg.layout.joints[j];
      q[j] = s.lower + (s.upper - s.lower) * (0.05 + 0.09 * ((k + 3 * j) % 10));
    }
    Json state = env.state_json();
    state["q"] = Json(std::vector<double>(q.begin(), q.end()));
    env.load_state(state);
    const sim::BodyPose& p = env.pose();
    for (int m = 0; m < 10; ++m) {
      const statics::HandForce f{12.0 * m, 0.05 * m, m % 2 == 0 ? -1 : 1};
      const double sim_zmp = env.zmp_of_pose(f);
      worst = std::max(
          {worst,
           std::abs(sim_zmp - statics::zmp_location(cfg.geometry, f, p.com.x(), p.hand.y(),
                                                    p.hand.x())),
           std::abs(sim_zmp - oracle::zmp(cfg.geometry.weight(), p.com.x(), p.hand.x(),
                                          p.hand.y(), f.horizontal(), f.vertical()))});
    }
  }
  Outcome o;
  o.pass = worst < kZmpTol;
  o.detail = "10x10 grid, max |zmp_sim - zmp_statics| = " + fmt("%.2e", worst) + " m";
  return o;
}

Outcome stand_training() {
  const auto t0 = std::chrono::steady_clock::now();
  train::TrainConfig c;
  c.curriculum_switch = kStandIterations + 1;
  sim::SimConfig sc;
  sc.force.stage1 = {0.0, 0.0, 0.0};
  train::Trainer trainer(c, sc, 0);
  const double target = kStandFraction * sc.max_episode_steps;
  double best = 0.0;
  int reached = -1;
  for (int i = 0; i < kStandIterations && reached < 0; ++i) {
    const double len = trainer.run_iteration().mean_episode_length;
    best = std::max(best, len);
    if (len >= target) reached = i + 1;
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = reached > 0 && secs < kStandSeconds;
  o.detail = (reached > 0 ? "mean episode length >= " + fmt("%.0f", target) + " at iteration " +
                                std::to_string(reached)
                          : "best mean episode length " + fmt("%.1f", best)) +
             ", " + fmt("%.0f", secs) + " s";
  return o;
}

Outcome tilt_sweep(const fs::path& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const train::TrainConfig c = behavior_budget();
  const sim::SimConfig sc;
  train::Trainer trainer(c, sc, 0);
  for (int i = 0; i < c.iterations; ++i) trainer.run_iteration();
  eval::PolicyController policy(trainer.bundle());
  const EvalConfig ec;
  const auto records = eval::tilt_force_sweep(policy, sc, ec.sweep_forces, ec.sweep, 0);
  write_csv((out / "tilt_sweep.csv").string(), "", eval::tilt_sweep_table(records));
  const eval::SweepSummary s = eval::summarize_sweep(records);
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = s.sustained >= 3 && s.spearman <= kSpearmanMax && s.mean_abs_error <= kTiltMaeMax &&
           secs < kSweepSeconds;
  o.detail = "sustained " + std::to_string(s.sustained) + "/" + std::to_string(records.size()) +
             ", spearman " + fmt("%.3f", s.spearman) + ", mean abs error " +
             fmt("%.3f", s.mean_abs_error) + " rad, " + fmt("%.0f", secs) + " s";
  return o;
}

Outcome ablation_order(const fs::path& out) {
  const train::TrainConfig c = behavior_budget();
  const sim::SimConfig sc;
  const EvalConfig ec;
  std::vector<std::uint64_t> seeds;
  for (int s = 0; s < kAblationSeeds; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
  std::vector<eval::PeakRow> rows;
  double mean[4] = {};
  const eval::Variant variants[4] = {eval::Variant::kFull, eval::Variant::kFat2Only,
                                     eval::Variant::kDecoupledOnly, eval::Variant::kNeither};
  std::string detail;
  for (int v = 0; v < 4; ++v) {
    const eval::AblationResult r =
        eval::ablation_run(c, sc, ec.peak, variants[v], seeds, ec.directions);
    rows.insert(rows.end(), r.rows.begin(), r.rows.end());
    mean[v] = r.peak.mean;
    detail += r.variant + " " + fmt("%.1f", r.peak.mean) + "+-" + fmt("%.1f", r.peak.se) +
              (v < 3 ? " N, " : " N");
  }
  write_csv((out / "ablation_peak_force.csv").string(), "", eval::peak_force_table(rows));
  Outcome o;
  o.pass = mean[0] >= mean[1] && mean[1] >= mean[3] && mean[0] >= mean[2] && mean[2] >= mean[3];
  o.detail = detail;
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(const fs::path& out) {
  train::TrainConfig c;
  c.curriculum_switch = 3;
  const sim::SimConfig sc;
  const int k = 3;
  train::Trainer straight(c, sc, 42);
  std::vector<std::vector<std::string>> rows_a, rows_b;
  for (int i = 0; i < 2 * k; ++i) rows_a.push_back(train::log_row(straight.run_iteration()));
  train::Trainer first(c, sc, 42);
  for (int i = 0; i < k; ++i) rows_b.push_back(train::log_row(first.run_iteration()));
  const std::string ckpt = (out / "split_checkpoint.json").string();
  save_checkpoint(ckpt, make_checkpoint(first, "split"));
  train::Trainer second(c, sc, 0);
  restore_trainer(second, load_checkpoint(ckpt));
  for (int i = 0; i < k; ++i) rows_b.push_back(train::log_row(second.run_iteration()));
  const bool split_ok = rows_a == rows_b &&
                        bundle_to_json(second.bundle()) == bundle_to_json(straight.bundle());

  // Re-run the CLI pipeline twice and compare every CSV byte for byte.
  bool csv_ok = true;
  std::string runs[2];
  for (int r = 0; r < 2; ++r) {
    RunConfig rc;
    rc.train.iterations = 2;
    rc.train.num_envs = 8;
    rc.train.rollout_length = 16;
    rc.eval.seeds = {0};
    rc.eval.peak.hold_seconds = 0.5;
    rc.eval.peak.coarse_step = 40.0;
    rc.eval.peak.resolution = 10.0;
    rc.quiet = true;
    rc.out_dir = (out / ("rerun_" + std::to_string(r))).string();
    fs::remove_all(rc.out_dir);
    std::ostringstream sink;
    csv_ok = csv_ok && cmd_train(rc, sink, sink) == 0;
    rc.checkpoint = (fs::path(rc.out_dir) / "checkpoint.json").string();
    csv_ok = csv_ok && cmd_eval(rc, sink, sink) == 0 && cmd_sweep(rc, sink, sink) == 0;
    runs[r] = rc.out_dir;
  }
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(runs[0])) {
    if (entry.path().extension() != ".csv") continue;
    const fs::path other = fs::path(runs[1]) / entry.path().filename();
    csv_ok = csv_ok && fs::exists(other) && slurp(entry.path()) == slurp(other);
    ++compared;
  }
  csv_ok = csv_ok && compared >= 3;
  Outcome o;
  o.pass = split_ok && csv_ok;
  o.detail = std::string("split ") + std::to_string(k) + "+" + std::to_string(k) + " vs " +
             std::to_string(2 * k) + ": " + (split_ok ? "bit-exact" : "differs") + "; " +
             std::to_string(compared) + " CSVs " + (csv_ok ? "byte-identical" : "differ");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"forcelab acceptance criteria"};
  std::string out = "acceptance_out";
  std::vector<int> only;
  app.add_option("--out", out, "Scratch directory for artifacts");
  app.add_option("--only", only, "Run only these criteria (1-10)")->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(out);
  const std::set<int> selected(only.begin(), only.end());

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"statics oracle suite", statics_suite},
      {"worked values", worked_values},
      {"gradient fidelity", gradient_check},
      {"GAE equivalence", gae_equivalence},
      {"loss identity", loss_identity},
      {"simulator-statics ZMP", sim_statics_equivalence},
      {"stand training", stand_training},
      {"tilt-force sweep", [&] { return tilt_sweep(out); }},
      {"ablation ordering", [&] { return ablation_order(out); }},
      {"determinism and persistence", [&] { return determinism(out); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && selected.count(id) == 0) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
