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

#ifndef FORCELAB_EVAL_H_
#define FORCELAB_EVAL_H_

#include <cstdint>
#include <string>
#include <vector>

#include "forcelab/csv.h"
#include "forcelab/sim.h"
#include "forcelab/trainer.h"

namespace forcelab::eval {

// Closed-loop joint commands for the evaluation protocols.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual void reset() {}
  virtual sim::JointVector act(const sim::Env& env, const sim::StepResult& current) = 0;
};

// Deterministic (mean) actions of a trained bundle.
class PolicyController : public Controller {
 public:
  explicit PolicyController(const train::PolicyBundle& bundle) : bundle_(bundle) {}
  sim::JointVector act(const sim::Env& env, const sim::StepResult& current) override;

 private:
  const train::PolicyBundle& bundle_;
};

// Holds the statics-predicted tilt for the true applied force by driving
// the waist; every other joint stays at its nominal angle. Reads the force
// directly, so it is an oracle rather than a deployable policy.
class ScriptedTiltController : public Controller {
 public:
  sim::JointVector act(const sim::Env& env, const sim::StepResult& current) override;
};

// Throws the body forward with saturated actions; falls at any force.
class ScriptedFallController : public Controller {
 public:
  sim::JointVector act(const sim::Env& env, const sim::StepResult& current) override;
};

// Planar pull directions: "forward" pulls the hand toward +x, "backward"
// toward -x.
int direction_sign(const std::string& direction);

struct PeakForceConfig {
  double ramp_rate = 50.0;    // N/s
  double hold_seconds = 2.0;  // s, sustained at the probe force
  int settle_steps = 25;      // policy steps at zero force before the ramp
  double coarse_step = 10.0;  // N
  double resolution = 1.0;    // N, final bracket width
  double max_force = 400.0;   // N, search ceiling
  double ground_angle = 0.0;  // rad
};

struct ProbeResult {
  double force = 0.0;
  bool sustained = false;
  sim::Termination termination = sim::Termination::kNone;
  int steps = 0;
  double min_tilt = 0.0;  // smallest ground-referenced tilt reached
};

struct ForceTrial {
  std::string direction;
  double ramp_rate = 0.0;
  double hold_seconds = 0.0;
  std::uint64_t seed = 0;
  double peak = 0.0;          // largest sustained magnitude, N
  double first_failed = 0.0;  // smallest failing magnitude found, N
  double min_tilt = 0.0;      // of the peak probe
  std::string reason;
  std::vector<ProbeResult> probes;
};

// Environment configuration used by every evaluation episode: standing
// command, static upper-body targets, no episode cap inside a probe.
sim::SimConfig eval_sim_config(const sim::SimConfig& base);

// Runs one episode: settle, ramp to `force`, hold. Deterministic in seed.
ProbeResult probe_force(Controller& controller, const sim::SimConfig& sim_config,
                        const std::string& direction, double force,
                        const PeakForceConfig& config, std::uint64_t seed);

// Coarse ramp of probe magnitudes until the first failure, then bisection
// between the last sustained and first failed magnitudes.
ForceTrial measure_peak_force(Controller& controller, const sim::SimConfig& sim_config,
                              const std::string& direction, const PeakForceConfig& config,
                              std::uint64_t seed);

struct SweepConfig {
  std::string direction = "backward";
  double ground_angle = 0.0;
  int settle_steps = 25;
  int ramp_steps = 50;
  int hold_steps = 150;
};

struct SweepRecord {
  double force = 0.0;
  double tilt = 0.0;       // mean realized tilt over the second half of the hold
  double predicted = 0.0;  // statics prediction for the same force
  bool survived = false;
};

std::vector<SweepRecord> tilt_force_sweep(Controller& controller,
                                          const sim::SimConfig& sim_config,
                                          const std::vector<double>& forces,
                                          const SweepConfig& config, std::uint64_t seed);

// Spearman rank correlation with average ranks for ties. NaN when either
// input is constant or shorter than 2.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

struct SweepSummary {
  int sustained = 0;
  double spearman = 0.0;
  double mean_abs_error = 0.0;  // over sustained records
};
SweepSummary summarize_sweep(const std::vector<SweepRecord>& records);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};
MeanSe mean_se(const std::vector<double>& values);

enum class Variant { kFull, kFat2Only, kDecoupledOnly, kNeither };
std::string to_string(Variant v);
Variant variant_from(const std::string& name);
void apply_variant(Variant v, train::TrainConfig& train_config, sim::SimConfig& sim_config);

struct PeakRow {
  std::string variant;
  std::string direction;
  std::uint64_t seed = 0;
  double peak = 0.0;
  std::string reason;
};

struct AblationResult {
  std::string variant;
  std::vector<PeakRow> rows;
  MeanSe peak;  // over all seeds and directions
};

// Trains `variant` once per seed with an identical budget, then measures the
// peak force in every direction with the deterministic policy.
AblationResult ablation_run(const train::TrainConfig& train_config,
                            const sim::SimConfig& sim_config,
                            const PeakForceConfig& peak_config, Variant variant,
                            const std::vector<std::uint64_t>& seeds,
                            const std::vector<std::string>& directions);

CsvTable peak_force_table(const std::vector<PeakRow>& rows);
CsvTable tilt_sweep_table(const std::vector<SweepRecord>& records);

}  // namespace forcelab::eval

#endif  // FORCELAB_EVAL_H_
