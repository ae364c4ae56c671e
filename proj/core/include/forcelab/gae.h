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

#ifndef FORCELAB_GAE_H_
#define FORCELAB_GAE_H_

#include <cstdint>
#include <span>
#include <vector>

namespace forcelab::rl {

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;  // advantages + values
};

// Generalized advantage estimation over one trajectory of length T.
// `values` holds T + 1 entries: V(s_0..s_{T-1}) and the bootstrap value of
// the state reached after the last step. dones[t] != 0 marks that the
// episode ended with step t, which zeroes both the bootstrap and the
// advantage carried back across the boundary.
GaeResult compute_gae(std::span<const double> rewards,
                      std::span<const double> values,
                      std::span<const std::uint8_t> dones, double gamma,
                      double lambda);

}  // namespace forcelab::rl

#endif  // FORCELAB_GAE_H_
