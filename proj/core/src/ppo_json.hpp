// Copyright 2026 The vtmarket Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Internal JSON helpers shared by the checkpoint writer and the scenario
// config loader. Not installed.

#ifndef VTMARKET_SRC_PPO_JSON_HPP_
#define VTMARKET_SRC_PPO_JSON_HPP_

#include <json.hpp>

#include "vtmarket/ppo.hpp"

namespace vtmarket {

nlohmann::json ppo_to_json(const PpoHyperparams& hp);
PpoHyperparams ppo_from_json(const nlohmann::json& j);

}  // namespace vtmarket

#endif  // VTMARKET_SRC_PPO_JSON_HPP_
