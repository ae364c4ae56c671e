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

#ifndef FORCELAB_CONFIG_H_
#define FORCELAB_CONFIG_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "forcelab/eval.h"
#include "forcelab/json.h"
#include "forcelab/sim.h"
#include "forcelab/trainer.h"

namespace forcelab {

// Process exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitMissingFile = 2,
  kExitParseError = 3,
  kExitUnknownKey = 4,
  kExitInvariant = 5,
  kExitRuntimeAbort = 10,
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int exit_code, const std::string& what)
      : std::runtime_error(what), exit_code_(exit_code) {}
  int exit_code() const { return exit_code_; }

 private:
  int exit_code_;
};

struct EvalConfig {
  eval::PeakForceConfig peak;
  eval::SweepConfig sweep;
  std::vector<double> sweep_forces{0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100, 110, 120};
  std::vector<std::string> directions{"forward", "backward"};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::vector<std::string> variants{"full", "fat2_only", "decoupled_only", "neither"};
  int trace_steps = 300;

  void validate() const;
};

struct RunConfig {
  std::uint64_t seed = 0;
  sim::SimConfig sim;
  train::TrainConfig train;
  EvalConfig eval;
  // Run plumbing; excluded from the content hash.
  std::string out_dir = "runs/default";
  std::string checkpoint;
  bool quiet = false;

  void validate() const;
};

Json config_to_json(const RunConfig& config);
// Strict conversion of a complete document; throws ConfigError.
RunConfig config_from_json(const Json& j);

// defaults <- file <- overrides. `path` may be empty (defaults only).
RunConfig parse_config(const std::string& path, const std::vector<std::string>& overrides);

// Applies one `key=value` override. The key is a full dotted path
// ("train.gamma") or any dotted suffix that is unique in the schema
// ("gamma", "stage1.cap").
void apply_override(Json& doc, const std::string& assignment);

// FNV-1a 64 of the canonical resolved document without the run section.
std::string config_hash(const RunConfig& config);

}  // namespace forcelab

#endif  // FORCELAB_CONFIG_H_
