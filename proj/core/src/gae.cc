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

#include "forcelab/gae.h"

#include <stdexcept>

namespace forcelab::rl {

GaeResult compute_gae(std::span<const double> rewards,
                      std::span<const double> values,
                      std::span<const std::uint8_t> dones, double gamma,
                      double lambda) {
  const std::size_t horizon = rewards.size();
  if (values.size() != horizon + 1 || dones.size() != horizon) {
    throw std::invalid_argument("compute_gae: inconsistent array lengths");
  }
  GaeResult out;
  out.advantages.assign(horizon, 0.0);
  out.returns.assign(horizon, 0.0);
  double carry = 0.0;
  for (std::size_t i = horizon; i-- > 0;) {
    const double live = dones[i] ? 0.0 : 1.0;
    const double delta = rewards[i] + gamma * values[i + 1] * live - values[i];
    carry = delta + gamma * lambda * live * carry;
    out.advantages[i] = carry;
    out.returns[i] = carry + values[i];
  }
  return out;
}

}  // namespace forcelab::rl
