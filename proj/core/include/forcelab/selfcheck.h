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

#ifndef FORCELAB_SELFCHECK_H_
#define FORCELAB_SELFCHECK_H_

#include <string>
#include <vector>

#include "forcelab/config.h"

namespace forcelab {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Fast cross-module invariant suite behind the `check` subcommand.
std::vector<CheckResult> run_selfcheck(const RunConfig& config);

}  // namespace forcelab

#endif  // FORCELAB_SELFCHECK_H_
