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

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "forcelab/commands.h"
#include "forcelab/config.h"
#include "forcelab/quasistatics.h"

namespace {

void on_signal(int) { forcelab::request_stop(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"forcelab: decoupled multi-agent PPO with force-adaptive torso tilt"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  std::string checkpoint;
  std::string seed;
  bool quiet = false;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--set", overrides, "Override a config key (key=value); repeatable")
      ->take_all();
  app.add_option("--out", out_dir, "Output directory (falls back to $THOR_LAB_OUT)");
  app.add_option("--checkpoint", checkpoint, "Checkpoint to resume or evaluate");
  app.add_option("--seed", seed, "Master seed");
  app.add_flag("--quiet", quiet, "Suppress progress output");

  auto* train = app.add_subcommand("train", "Train the policy bundle");
  auto* eval = app.add_subcommand("eval", "Measure peak sustainable force per direction");
  auto* sweep = app.add_subcommand("sweep", "Sweep constant forces and record torso tilt");
  auto* ablate = app.add_subcommand("ablate", "Train and compare ablation variants");
  auto* check = app.add_subcommand("check", "Run the invariant suite");
  for (auto* sub : {train, eval, sweep, ablate, check}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return forcelab::kExitParseError;
  }

  std::vector<std::string> all = overrides;
  if (!seed.empty()) all.push_back("seed=" + seed);
  if (!checkpoint.empty()) all.push_back("run.checkpoint=" + checkpoint);
  if (quiet) all.push_back("run.quiet=true");

  forcelab::RunConfig config;
  try {
    config = forcelab::parse_config(config_path, all);
    if (!out_dir.empty()) {
      config.out_dir = out_dir;
    } else if (config.out_dir == forcelab::RunConfig{}.out_dir) {
      if (const char* env = std::getenv("THOR_LAB_OUT"); env != nullptr && *env != '\0') {
        config.out_dir = env;
      }
    }
  } catch (const forcelab::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  }

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  try {
    if (*train) return forcelab::cmd_train(config, std::cout, std::cerr);
    if (*eval) return forcelab::cmd_eval(config, std::cout, std::cerr);
    if (*sweep) return forcelab::cmd_sweep(config, std::cout, std::cerr);
    if (*ablate) return forcelab::cmd_ablate(config, std::cout, std::cerr);
    return forcelab::cmd_check(config, std::cout, std::cerr);
  } catch (const forcelab::statics::StaticsError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return forcelab::kExitInvariant;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return forcelab::kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return forcelab::kExitRuntimeAbort;
  }
}
