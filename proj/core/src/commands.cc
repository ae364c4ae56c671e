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

#include "forcelab/commands.h"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "forcelab/checkpoint.h"
#include "forcelab/csv.h"
#include "forcelab/eval.h"
#include "forcelab/selfcheck.h"
#include "forcelab/trainer.h"

namespace forcelab {
namespace {

std::atomic<bool> g_stop{false};

namespace fs = std::filesystem;

std::string out_path(const RunConfig& c, const std::string& name) {
  return (fs::path(c.out_dir) / name).string();
}

std::string checkpoint_path(const RunConfig& c) {
  return c.checkpoint.empty() ? out_path(c, "checkpoint.json") : c.checkpoint;
}

void write_resolved_config(const RunConfig& c, const std::string& hash) {
  fs::create_directories(c.out_dir);
  Json doc;
  doc["forcelab_version"] = FORCELAB_VERSION;
  doc["config_hash"] = hash;
  doc["config"] = config_to_json(c);
  std::ofstream out(out_path(c, "resolved_config.json"), std::ios::binary | std::ios::trunc);
  out << doc.dump(2) << '\n';
}

int checkpoint_exit_code(const CheckpointError& e) {
  if (dynamic_cast<const CheckpointMissingError*>(&e) != nullptr) return kExitMissingFile;
  if (dynamic_cast<const CheckpointCorruptError*>(&e) != nullptr) return kExitParseError;
  if (dynamic_cast<const CheckpointMismatchError*>(&e) != nullptr) return kExitInvariant;
  return kExitRuntimeAbort;
}

// Loads the checkpoint named by the config and checks it against the
// configured architecture. Returns an exit code on failure.
int load_bundle(const RunConfig& c, Checkpoint& ckpt, std::ostream& err) {
  try {
    ckpt = load_checkpoint(checkpoint_path(c));
    check_bundle_shape(ckpt.bundle, c.train);
  } catch (const CheckpointError& e) {
    err << "error: " << e.what() << '\n';
    return checkpoint_exit_code(e);
  }
  return kExitOk;
}

}  // namespace

void request_stop() { g_stop.store(true); }
bool stop_requested() { return g_stop.load(); }
void clear_stop_request() { g_stop.store(false); }

int cmd_train(const RunConfig& c, std::ostream& log, std::ostream& err) {
  const std::string hash = config_hash(c);
  const std::string stamp = artifact_stamp(hash);
  write_resolved_config(c, hash);
  train::Trainer trainer(c.train, c.sim, c.seed);
  const std::string log_path = out_path(c, "train_log.csv");
  if (!c.checkpoint.empty()) {
    try {
      restore_trainer(trainer, load_checkpoint(c.checkpoint));
    } catch (const CheckpointError& e) {
      err << "error: " << e.what() << '\n';
      return checkpoint_exit_code(e);
    }
    if (!c.quiet) log << "resumed from " << c.checkpoint << " at iteration "
                      << trainer.iteration() << '\n';
  } else {
    fs::remove(log_path);
  }
  const std::string ckpt_path = out_path(c, "checkpoint.json");
  auto save = [&] { save_checkpoint(ckpt_path, make_checkpoint(trainer, hash)); };

  const auto start = std::chrono::steady_clock::now();
  CsvTable rows;
  rows.header = train::log_header(trainer.bundle());
  while (trainer.iteration() < c.train.iterations) {
    if (stop_requested()) {
      save();
      err << "interrupted at iteration " << trainer.iteration() << "; checkpoint written to "
          << ckpt_path << '\n';
      return kExitRuntimeAbort;
    }
    train::IterationLog it;
    try {
      it = trainer.run_iteration();
    } catch (const train::TrainingAbort& e) {
      save();
      err << "error: training aborted at iteration " << trainer.iteration() + 1 << ": "
          << e.what() << '\n';
      return kExitRuntimeAbort;
    }
    rows.rows.clear();
    rows.add_row(train::log_row(it));
    append_csv(log_path, stamp, rows);
    if (c.train.checkpoint_every > 0 && it.iteration % c.train.checkpoint_every == 0) save();
    if (!c.quiet && (it.iteration % 10 == 0 || it.iteration == c.train.iterations)) {
      log << "iter " << it.iteration << " stage " << it.stage << " ep_len "
          << format_double(it.mean_episode_length) << " loss "
          << format_double(it.update.total_loss) << std::endl;
    }
  }
  save();
  if (!c.quiet) {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    log << "trained " << trainer.iteration() << " iterations in " << secs << " s; checkpoint "
        << ckpt_path << '\n';
  }
  return kExitOk;
}

int cmd_eval(const RunConfig& c, std::ostream& log, std::ostream& err) {
  Checkpoint ckpt;
  if (const int code = load_bundle(c, ckpt, err); code != kExitOk) return code;
  const std::string hash = config_hash(c);
  const std::string stamp = artifact_stamp(hash);
  write_resolved_config(c, hash);
  eval::PolicyController controller(ckpt.bundle);
  std::vector<eval::PeakRow> rows;
  for (const std::string& dir : c.eval.directions) {
    std::vector<double> peaks;
    for (std::uint64_t seed : c.eval.seeds) {
      if (stop_requested()) return kExitRuntimeAbort;
      const eval::ForceTrial t = eval::measure_peak_force(controller, c.sim, dir, c.eval.peak, seed);
      rows.push_back({ckpt.bundle.architecture, dir, seed, t.peak, t.reason});
      peaks.push_back(t.peak);
    }
    const eval::MeanSe m = eval::mean_se(peaks);
    if (!c.quiet) {
      log << dir << ": peak " << format_double(m.mean) << " +- " << format_double(m.se)
          << " N over " << peaks.size() << " seeds\n";
    }
  }
  write_csv(out_path(c, "peak_force.csv"), stamp, eval::peak_force_table(rows));

  if (c.eval.trace_steps > 0) {
    sim::SimConfig sc = eval::eval_sim_config(c.sim);
    sim::Env env(sc);
    sim::StepResult r = env.reset(c.eval.seeds.front(), 2);
    sim::TraceRecorder trace;
    for (int t = 0; t < c.eval.trace_steps && !r.done; ++t) {
      r = env.step(ckpt.bundle.act(r.observation));
      trace.record(env, r);
    }
    trace.write_csv(out_path(c, "trace.csv"), stamp);
  }
  return kExitOk;
}

int cmd_sweep(const RunConfig& c, std::ostream& log, std::ostream& err) {
  Checkpoint ckpt;
  if (const int code = load_bundle(c, ckpt, err); code != kExitOk) return code;
  const std::string hash = config_hash(c);
  write_resolved_config(c, hash);
  eval::PolicyController controller(ckpt.bundle);
  const auto records = eval::tilt_force_sweep(controller, c.sim, c.eval.sweep_forces,
                                              c.eval.sweep, c.eval.seeds.front());
  write_csv(out_path(c, "tilt_sweep.csv"), artifact_stamp(hash),
            eval::tilt_sweep_table(records));
  if (!c.quiet) {
    const eval::SweepSummary s = eval::summarize_sweep(records);
    log << "sustained " << s.sustained << "/" << records.size() << " forces; spearman "
        << format_double(s.spearman) << "; mean abs tilt error "
        << format_double(s.mean_abs_error) << " rad\n";
  }
  return kExitOk;
}

int cmd_ablate(const RunConfig& c, std::ostream& log, std::ostream&) {
  const std::string hash = config_hash(c);
  const std::string stamp = artifact_stamp(hash);
  write_resolved_config(c, hash);
  std::vector<eval::PeakRow> rows;
  CsvTable summary;
  summary.header = {"variant", "mean_peak_N", "se_N", "trials"};
  for (const std::string& name : c.eval.variants) {
    if (stop_requested()) return kExitRuntimeAbort;
    const eval::AblationResult r =
        eval::ablation_run(c.train, c.sim, c.eval.peak, eval::variant_from(name),
                           c.eval.seeds, c.eval.directions);
    rows.insert(rows.end(), r.rows.begin(), r.rows.end());
    summary.add_row({name, format_double(r.peak.mean), format_double(r.peak.se),
                     std::to_string(r.rows.size())});
    if (!c.quiet) {
      log << name << ": peak " << format_double(r.peak.mean) << " +- "
          << format_double(r.peak.se) << " N" << std::endl;
    }
  }
  write_csv(out_path(c, "peak_force.csv"), stamp, eval::peak_force_table(rows));
  write_csv(out_path(c, "ablation_summary.csv"), stamp, summary);
  return kExitOk;
}

int cmd_check(const RunConfig& c, std::ostream& log, std::ostream&) {
  bool ok = true;
  for (const CheckResult& r : run_selfcheck(c)) {
    ok = ok && r.passed;
    log << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
  }
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace forcelab
