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

#include "forcelab/eval.h"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "forcelab/body.h"
#include "forcelab/quasistatics.h"
#include "forcelab/rng.h"
#include "oracles.h"

namespace forcelab::eval {
namespace {

PeakForceConfig quick_peak() {
  PeakForceConfig c;
  c.hold_seconds = 1.0;
  c.max_force = 400.0;
  return c;
}

TEST(Spearman, MatchesClosedFormWithoutTies) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(12), y(12);
    for (int i = 0; i < 12; ++i) {
      x[i] = rng.normal();
      y[i] = 0.5 * x[i] + rng.normal();
    }
    EXPECT_NEAR(spearman(x, y), oracle::spearman_no_ties(x, y), 1e-12);
  }
}

TEST(Spearman, TiesAndDegenerateInputs) {
  EXPECT_DOUBLE_EQ(spearman({1, 2, 3, 4}, {4, 3, 2, 1}), -1.0);
  EXPECT_DOUBLE_EQ(spearman({1, 2, 2, 3}, {1, 2, 2, 3}), 1.0);
  EXPECT_TRUE(std::isnan(spearman({1, 1, 1}, {1, 2, 3})));
  EXPECT_TRUE(std::isnan(spearman({1}, {1})));
  EXPECT_THROW(spearman({1, 2}, {1}), std::invalid_argument);
}

TEST(MeanSe, SampleStandardError) {
  const MeanSe m = mean_se({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_NEAR(m.se, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
  EXPECT_DOUBLE_EQ(mean_se({7.0}).se, 0.0);
}

TEST(Directions, Mapping) {
  EXPECT_EQ(direction_sign("forward"), 1);
  EXPECT_EQ(direction_sign("backward"), -1);
  EXPECT_THROW(direction_sign("sideways"), std::invalid_argument);
}

TEST(PeakForce, FallingControllerHasZeroPeak) {
  ScriptedFallController c;
  const ForceTrial t = measure_peak_force(c, sim::SimConfig{}, "backward", quick_peak(), 1);
  EXPECT_EQ(t.peak, 0.0);
  EXPECT_EQ(t.reason.rfind("fails_at_zero_force", 0), 0u) << t.reason;
}

TEST(PeakForce, BisectionBracketsTheFirstFailure) {
  ScriptedTiltController c;
  const PeakForceConfig cfg = quick_peak();
  const ForceTrial t = measure_peak_force(c, sim::SimConfig{}, "backward", cfg, 2);
  ASSERT_GT(t.peak, 0.0) << t.reason;
  ASSERT_GT(t.first_failed, t.peak);
  EXPECT_LE(t.first_failed - t.peak, cfg.resolution);
  // The bracket endpoints reproduce: the peak holds, the first failure does not.
  EXPECT_TRUE(probe_force(c, sim::SimConfig{}, "backward", t.peak, cfg, 2).sustained);
  EXPECT_FALSE(probe_force(c, sim::SimConfig{}, "backward", t.first_failed, cfg, 2).sustained);
}

TEST(PeakForce, DeterministicInSeed) {
  ScriptedTiltController c;
  const ForceTrial a = measure_peak_force(c, sim::SimConfig{}, "forward", quick_peak(), 3);
  const ForceTrial b = measure_peak_force(c, sim::SimConfig{}, "forward", quick_peak(), 3);
  EXPECT_EQ(a.peak, b.peak);
  EXPECT_EQ(a.probes.size(), b.probes.size());
}

TEST(PeakForce, CeilingIsReported) {
  ScriptedTiltController c;
  PeakForceConfig cfg = quick_peak();
  cfg.max_force = 20.0;
  const ForceTrial t = measure_peak_force(c, sim::SimConfig{}, "backward", cfg, 2);
  EXPECT_EQ(t.peak, 20.0);
  EXPECT_EQ(t.reason, "search_ceiling");
}

TEST(PeakForce, ScriptedTiltBeatsUprightStance) {
  // Holding the predicted lean must sustain more than the upright body,
  // whose ZMP leaves the support region at a much lower pull.
  ScriptedTiltController tilt;
  const sim::SimConfig sc;
  const PeakForceConfig cfg = quick_peak();
  const ForceTrial leaning = measure_peak_force(tilt, sc, "backward", cfg, 5);

  class Upright : public Controller {
   public:
    sim::JointVector act(const sim::Env&, const sim::StepResult&) override { return {}; }
  } upright;
  const ForceTrial straight = measure_peak_force(upright, sc, "backward", cfg, 5);
  EXPECT_GT(leaning.peak, straight.peak + 10.0);
}

TEST(PeakForce, ScriptedOracleSustainsTheStaticsEnvelope) {
  // Up to the largest force balanced at the lean limit, the statics give an
  // equilibrium with the ZMP at the pivot, so the oracle must hold it. Above
  // that the lean stays clamped and the pull drags the ZMP across the support
  // region; it cannot survive past the far edge of that window.
  ScriptedTiltController c;
  const sim::SimConfig sc;
  PeakForceConfig cfg;
  cfg.max_force = 500.0;
  const ForceTrial t = measure_peak_force(c, sc, "backward", cfg, 1);

  sim::Env env(eval_sim_config(sc));
  env.reset(1, 2);
  const double f_max = statics::max_interactive_force(env.effective_geometry(), 0.0, sc.beta_lim);
  sim::JointVector q = sc.layout.nominal();
  q[sim::kAnkle] += std::numbers::pi / 2.0 - sc.beta_lim;
  const sim::BodyPose lean = sim::forward_kinematics(sc.layout, q);
  statics::BodyGeometry g = sc.geometry;
  g.total_mass = sc.layout.total_mass();
  // ZMP is affine in the horizontal pull, so the window edge is a closed form.
  const double w = g.weight();
  const double upper_edge = (lean.com.x() - g.support_min) * w / lean.hand.y();
  EXPECT_NEAR(statics::zmp_location(g, {upper_edge, 0.0, -1}, lean.com.x(), lean.hand.y(),
                                    lean.hand.x()),
              g.support_min, 1e-12);

  EXPECT_GE(t.peak, f_max) << t.reason;
  EXPECT_LE(t.peak, upper_edge);
}

TEST(Sweep, PredictedColumnIsTheStaticsTarget) {
  ScriptedTiltController c;
  const sim::SimConfig sc;
  SweepConfig cfg;
  cfg.hold_steps = 60;
  const std::vector<double> forces{0, 20, 40, 60};
  const auto records = tilt_force_sweep(c, sc, forces, cfg, 7);
  ASSERT_EQ(records.size(), forces.size());
  sim::Env env(eval_sim_config(sc));
  env.reset(7, 2);
  for (std::size_t i = 0; i < records.size(); ++i) {
    statics::HandForce f{forces[i], cfg.ground_angle, direction_sign(cfg.direction)};
    EXPECT_DOUBLE_EQ(records[i].predicted,
                     statics::expected_tilt(env.effective_geometry(), f, sc.beta_lim).beta);
    EXPECT_TRUE(records[i].survived);
    // The scripted oracle tracks its own target closely.
    EXPECT_NEAR(records[i].tilt, records[i].predicted, 0.05);
  }
  const SweepSummary s = summarize_sweep(records);
  EXPECT_EQ(s.sustained, 4);
  EXPECT_LT(s.spearman, -0.99);
}

TEST(Sweep, RequiresAscendingForces) {
  ScriptedTiltController c;
  EXPECT_THROW(tilt_force_sweep(c, sim::SimConfig{}, {10, 5}, SweepConfig{}, 1),
               std::invalid_argument);
}

TEST(Sweep, CsvIsDeterministic) {
  ScriptedTiltController c;
  SweepConfig cfg;
  cfg.hold_steps = 20;
  const auto a = tilt_sweep_table(tilt_force_sweep(c, sim::SimConfig{}, {0, 30}, cfg, 1));
  const auto b = tilt_sweep_table(tilt_force_sweep(c, sim::SimConfig{}, {0, 30}, cfg, 1));
  EXPECT_EQ(a.to_string("x"), b.to_string("x"));
}

TEST(Variants, Mapping) {
  for (Variant v : {Variant::kFull, Variant::kFat2Only, Variant::kDecoupledOnly, Variant::kNeither}) {
    EXPECT_EQ(variant_from(to_string(v)), v);
  }
  EXPECT_THROW(variant_from("half"), std::invalid_argument);

  auto applied = [](Variant v) {
    train::TrainConfig t;
    sim::SimConfig s;
    apply_variant(v, t, s);
    return std::make_pair(t.architecture, s.reward.fat2_enabled);
  };
  EXPECT_EQ(applied(Variant::kFull), std::make_pair(std::string("decoupled"), true));
  EXPECT_EQ(applied(Variant::kFat2Only), std::make_pair(std::string("monolithic"), true));
  EXPECT_EQ(applied(Variant::kDecoupledOnly), std::make_pair(std::string("decoupled"), false));
  EXPECT_EQ(applied(Variant::kNeither), std::make_pair(std::string("monolithic"), false));
}

TEST(Ablation, RowsPerSeedAndDirection) {
  train::TrainConfig t;
  t.iterations = 1;
  t.num_envs = 2;
  t.rollout_length = 8;
  t.hidden_layers = {8};
  PeakForceConfig p = quick_peak();
  p.hold_seconds = 0.2;
  p.coarse_step = 50.0;
  p.resolution = 25.0;
  const AblationResult r =
      ablation_run(t, sim::SimConfig{}, p, Variant::kNeither, {0, 1}, {"forward", "backward"});
  EXPECT_EQ(r.variant, "neither");
  EXPECT_EQ(r.rows.size(), 4u);
  const AblationResult again =
      ablation_run(t, sim::SimConfig{}, p, Variant::kNeither, {0, 1}, {"forward", "backward"});
  EXPECT_EQ(peak_force_table(r.rows).to_string("x"), peak_force_table(again.rows).to_string("x"));
}

}  // namespace
}  // namespace forcelab::eval
