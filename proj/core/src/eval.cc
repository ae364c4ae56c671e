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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "forcelab/quasistatics.h"

namespace forcelab::eval {
namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

int steps_for(double seconds, double policy_dt) {
  return static_cast<int>(std::lround(seconds / policy_dt));
}

}  // namespace

sim::JointVector PolicyController::act(const sim::Env&, const sim::StepResult& current) {
  return bundle_.act(current.observation);
}

sim::JointVector ScriptedTiltController::act(const sim::Env& env, const sim::StepResult&) {
  const sim::SimConfig& cfg = env.config();
  const statics::HandForce f = env.applied_force();
  const double beta = statics::expected_tilt(env.effective_geometry(), f, cfg.beta_lim).beta;
  const double target_pitch = f.direction_sign * (beta - std::numbers::pi / 2.0);
  // Rigid lean about the ankle: the lumped model's lever arms stay valid.
  const sim::JointVector& q = env.q();
  const double above = q[sim::kKnee] + q[sim::kHip] + q[sim::kWaist];
  const double nominal_above = cfg.layout.joints[sim::kKnee].nominal +
                               cfg.layout.joints[sim::kHip].nominal +
                               cfg.layout.joints[sim::kWaist].nominal;
  const double ankle = target_pitch - nominal_above + (nominal_above - above);
  sim::JointVector a{};
  a[sim::kAnkle] = (ankle - cfg.layout.joints[sim::kAnkle].nominal) / cfg.action_scale;
  return a;
}

sim::JointVector ScriptedFallController::act(const sim::Env&, const sim::StepResult&) {
  return {1.0, 0.0, 1.0, 1.0, 1.0, 1.0};
}

int direction_sign(const std::string& direction) {
  if (direction == "forward") return 1;
  if (direction == "backward") return -1;
  throw std::invalid_argument("direction must be forward or backward, got " + direction);
}

sim::SimConfig eval_sim_config(const sim::SimConfig& base) {
  sim::SimConfig c = base;
  c.upper_targets.amplitude = 0.0;
  c.command.locomote_probability = 0.0;
  c.command.height_range = 0.0;
  c.max_episode_steps = std::numeric_limits<int>::max();
  return c;
}

ProbeResult probe_force(Controller& controller, const sim::SimConfig& sim_config,
                        const std::string& direction, double force,
                        const PeakForceConfig& config, std::uint64_t seed) {
  const sim::SimConfig cfg = eval_sim_config(sim_config);
  sim::Env env(cfg);
  controller.reset();
  sim::StepResult current = env.reset(seed, 2);
  sim::ForceSchedule schedule;
  schedule.magnitude = force;
  schedule.ground_angle = config.ground_angle;
  schedule.direction_sign = direction_sign(direction);
  schedule.onset_step = config.settle_steps;
  schedule.ramp_steps =
      config.ramp_rate > 0.0
          ? static_cast<int>(std::ceil(force / config.ramp_rate / cfg.policy_dt()))
          : 0;
  env.set_force_schedule(schedule);
  const int total =
      config.settle_steps + schedule.ramp_steps + steps_for(config.hold_seconds, cfg.policy_dt());

  ProbeResult out;
  out.force = force;
  out.min_tilt = std::numbers::pi / 2.0;
  for (int t = 0; t < total; ++t) {
    const sim::JointVector a = controller.act(env, current);
    current = env.step(a);
    out.steps = t + 1;
    if (t >= config.settle_steps) out.min_tilt = std::min(out.min_tilt, current.beta_actual);
    if (current.done) {
      out.termination = current.termination;
      return out;
    }
  }
  out.sustained = true;
  return out;
}

ForceTrial measure_peak_force(Controller& controller, const sim::SimConfig& sim_config,
                              const std::string& direction, const PeakForceConfig& config,
                              std::uint64_t seed) {
  if (config.coarse_step <= 0.0 || config.resolution <= 0.0 || config.max_force < 0.0) {
    throw std::invalid_argument("peak force search needs positive step and resolution");
  }
  ForceTrial trial;
  trial.direction = direction;
  trial.ramp_rate = config.ramp_rate;
  trial.hold_seconds = config.hold_seconds;
  trial.seed = seed;
  auto probe = [&](double f) {
    ProbeResult p = probe_force(controller, sim_config, direction, f, config, seed);
    trial.probes.push_back(p);
    return p;
  };

  const ProbeResult zero = probe(0.0);
  if (!zero.sustained) {
    trial.reason = "fails_at_zero_force:" + sim::to_string(zero.termination);
    return trial;
  }
  double lo = 0.0;
  double lo_tilt = zero.min_tilt;
  double hi = -1.0;
  sim::Termination fail = sim::Termination::kNone;
  for (double f = config.coarse_step; f <= config.max_force + 1e-9; f += config.coarse_step) {
    const ProbeResult p = probe(f);
    if (!p.sustained) {
      hi = f;
      fail = p.termination;
      break;
    }
    lo = f;
    lo_tilt = p.min_tilt;
  }
  if (hi < 0.0) {
    trial.peak = lo;
    trial.first_failed = std::numeric_limits<double>::infinity();
    trial.min_tilt = lo_tilt;
    trial.reason = "search_ceiling";
    return trial;
  }
  while (hi - lo > config.resolution) {
    const double mid = 0.5 * (lo + hi);
    const ProbeResult p = probe(mid);
    if (p.sustained) {
      lo = mid;
      lo_tilt = p.min_tilt;
    } else {
      hi = mid;
      fail = p.termination;
    }
  }
  trial.peak = lo;
  trial.first_failed = hi;
  trial.min_tilt = lo_tilt;
  trial.reason = sim::to_string(fail);
  return trial;
}

std::vector<SweepRecord> tilt_force_sweep(Controller& controller,
                                          const sim::SimConfig& sim_config,
                                          const std::vector<double>& forces,
                                          const SweepConfig& config, std::uint64_t seed) {
  if (!std::is_sorted(forces.begin(), forces.end())) {
    throw std::invalid_argument("sweep forces must be sorted ascending");
  }
  const sim::SimConfig cfg = eval_sim_config(sim_config);
  const int sign = direction_sign(config.direction);
  const int total = config.settle_steps + config.ramp_steps + config.hold_steps;
  const int window_start = config.settle_steps + config.ramp_steps + config.hold_steps / 2;
  std::vector<SweepRecord> out;
  for (double force : forces) {
    sim::Env env(cfg);
    controller.reset();
    sim::StepResult current = env.reset(seed, 2);
    sim::ForceSchedule schedule{force, config.ground_angle, sign, config.settle_steps,
                                config.ramp_steps};
    env.set_force_schedule(schedule);
    SweepRecord rec;
    rec.force = force;
    rec.predicted =
        statics::expected_tilt(env.effective_geometry(), schedule.at(total), cfg.beta_lim).beta;
    double acc = 0.0;
    int n = 0;
    bool failed = false;
    for (int t = 0; t < total; ++t) {
      current = env.step(controller.act(env, current));
      if (t >= window_start) {
        acc += current.beta_actual;
        ++n;
      }
      if (current.done) {
        failed = true;
        break;
      }
    }
    rec.tilt = n > 0 ? acc / n : current.beta_actual;
    rec.survived = !failed;
    out.push_back(rec);
  }
  return out;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: size mismatch");
  const std::size_t n = x.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

SweepSummary summarize_sweep(const std::vector<SweepRecord>& records) {
  SweepSummary s;
  std::vector<double> f;
  std::vector<double> tilt;
  double err = 0.0;
  for (const SweepRecord& r : records) {
    if (!r.survived) continue;
    f.push_back(r.force);
    tilt.push_back(r.tilt);
    err += std::abs(r.tilt - r.predicted);
  }
  s.sustained = static_cast<int>(f.size());
  s.spearman = spearman(f, tilt);
  s.mean_abs_error = f.empty() ? std::numeric_limits<double>::quiet_NaN() : err / f.size();
  return s;
}

MeanSe mean_se(const std::vector<double>& values) {
  MeanSe m;
  if (values.empty()) return m;
  const double n = static_cast<double>(values.size());
  m.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return m;
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::kFull: return "full";
    case Variant::kFat2Only: return "fat2_only";
    case Variant::kDecoupledOnly: return "decoupled_only";
    case Variant::kNeither: return "neither";
  }
  return "full";
}

Variant variant_from(const std::string& name) {
  if (name == "full") return Variant::kFull;
  if (name == "fat2_only") return Variant::kFat2Only;
  if (name == "decoupled_only") return Variant::kDecoupledOnly;
  if (name == "neither") return Variant::kNeither;
  throw std::invalid_argument("unknown ablation variant: " + name);
}

void apply_variant(Variant v, train::TrainConfig& train_config, sim::SimConfig& sim_config) {
  switch (v) {
    case Variant::kFull:
      return;
    case Variant::kFat2Only:
      train_config.architecture = "monolithic";
      sim_config.reward.fat2_enabled = true;
      return;
    case Variant::kDecoupledOnly:
      train_config.architecture = "decoupled";
      sim_config.reward.fat2_enabled = false;
      return;
    case Variant::kNeither:
      train_config.architecture = "monolithic";
      sim_config.reward.fat2_enabled = false;
      return;
  }
}

AblationResult ablation_run(const train::TrainConfig& train_config,
                            const sim::SimConfig& sim_config,
                            const PeakForceConfig& peak_config, Variant variant,
                            const std::vector<std::uint64_t>& seeds,
                            const std::vector<std::string>& directions) {
  AblationResult result;
  result.variant = to_string(variant);
  std::vector<double> peaks;
  for (std::uint64_t seed : seeds) {
    train::TrainConfig tc = train_config;
    sim::SimConfig sc = sim_config;
    apply_variant(variant, tc, sc);
    train::Trainer trainer(tc, sc, seed);
    for (int i = 0; i < tc.iterations; ++i) trainer.run_iteration();
    PolicyController controller(trainer.bundle());
    for (const std::string& dir : directions) {
      const ForceTrial trial = measure_peak_force(controller, sc, dir, peak_config, seed);
      result.rows.push_back({result.variant, dir, seed, trial.peak, trial.reason});
      peaks.push_back(trial.peak);
    }
  }
  result.peak = mean_se(peaks);
  return result;
}

CsvTable peak_force_table(const std::vector<PeakRow>& rows) {
  CsvTable t;
  t.header = {"variant", "direction", "seed", "peak_N", "reason"};
  for (const PeakRow& r : rows) {
    t.add_row({r.variant, r.direction, std::to_string(r.seed), format_double(r.peak), r.reason});
  }
  return t;
}

CsvTable tilt_sweep_table(const std::vector<SweepRecord>& records) {
  CsvTable t;
  t.header = {"force_N", "tilt_rad", "predicted_tilt_rad", "survived"};
  for (const SweepRecord& r : records) {
    t.add_row({format_double(r.force), format_double(r.tilt), format_double(r.predicted),
               r.survived ? "1" : "0"});
  }
  return t;
}

}  // namespace forcelab::eval
