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

#ifndef FORCELAB_JSON_H_
#define FORCELAB_JSON_H_

#include <nlohmann/json.hpp>

namespace forcelab {

// Insertion-ordered so serialized field order is fixed.
using Json = nlohmann::ordered_json;

}  // namespace forcelab

#endif  // FORCELAB_JSON_H_
