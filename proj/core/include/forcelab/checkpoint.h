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

#ifndef FORCELAB_CHECKPOINT_H_
#define FORCELAB_CHECKPOINT_H_

#include <optional>
#include <stdexcept>
#include <string>

#include "forcelab/json.h"
#include "forcelab/trainer.h"

namespace forcelab {

inline constexpr int kCheckpointFormatVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
// File is absent or unreadable.
class CheckpointMissingError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};
// File is not valid checkpoint JSON.
class CheckpointCorruptError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};
// Format version or network shapes do not match what is expected.
class CheckpointMismatchError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

struct Checkpoint {
  std::string tool_version;
  std::string config_hash;
  long long iteration = 0;
  train::PolicyBundle bundle;
  std::optional<Json> trainer_state;
};

Json bundle_to_json(const train::PolicyBundle& bundle);
train::PolicyBundle bundle_from_json(const Json& j);

Json checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const Json& j);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

Checkpoint make_checkpoint(const train::Trainer& trainer, const std::string& config_hash);
// Restores bundle and trainer state. Throws CheckpointMismatchError when the
// stored architecture or layer widths differ from the trainer's.
void restore_trainer(train::Trainer& trainer, const Checkpoint& ckpt);

// Throws CheckpointMismatchError if the bundle was built with a different
// architecture or hidden widths than `config` requests.
void check_bundle_shape(const train::PolicyBundle& bundle, const train::TrainConfig& config);

}  // namespace forcelab

#endif  // FORCELAB_CHECKPOINT_H_
