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

#ifndef FORCELAB_COMMANDS_H_
#define FORCELAB_COMMANDS_H_

#include <iosfwd>

#include "forcelab/config.h"

namespace forcelab {

// Set from a signal handler; long-running commands checkpoint and return
// kExitRuntimeAbort at the next iteration boundary.
void request_stop();
bool stop_requested();
void clear_stop_request();

// Each command returns a process exit code. Progress goes to `log` unless
// the configuration is quiet; errors go to `err`.
int cmd_train(const RunConfig& config, std::ostream& log, std::ostream& err);
int cmd_eval(const RunConfig& config, std::ostream& log, std::ostream& err);
int cmd_sweep(const RunConfig& config, std::ostream& log, std::ostream& err);
int cmd_ablate(const RunConfig& config, std::ostream& log, std::ostream& err);
int cmd_check(const RunConfig& config, std::ostream& log, std::ostream& err);

}  // namespace forcelab

#endif  // FORCELAB_COMMANDS_H_
