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

#ifndef VTMARKET_SCENARIO_HPP_
#define VTMARKET_SCENARIO_HPP_

// Experiment configuration: one market scenario plus learner settings and a
// scheme selector. Serialized as JSON; the exact grammar is documented in
// the README. Loading validates every invariant and reports the offending
// field on failure.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vtmarket/channel.hpp"
#include "vtmarket/game.hpp"
#include "vtmarket/ppo.hpp"

namespace vtmarket {

enum class Scheme { kDrl, kGreedy, kRandom, kAnalytic };

Scheme parse_scheme(const std::string& name);
const char* to_string(Scheme scheme);

// Raised on malformed or invalid configuration input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  ChannelParams channel;
  MspConfig msp{5.0, 0.5, 50.0};
  std::vector<VmuProfile> vmus;
  PpoHyperparams ppo;
  uint64_t seed = 1;
  Scheme scheme = Scheme::kAnalytic;
  double greedy_explore_eps = 0.1;
  int max_vmus = 64;

  void validate() const;

  bool operator==(const ScenarioConfig&) const = default;
};

// Two followers with immersion coefficient 5 and twin sizes 2.0/1.0
// (200 MB and 100 MB), cost 5, cap 0.5, price cap 50 - the scenario used
// throughout the docs and tests.
ScenarioConfig two_vmu_scenario();

std::string serialize_scenario(const ScenarioConfig& config);
ScenarioConfig parse_scenario(const std::string& text);

void save_scenario(const ScenarioConfig& config,
                   const std::filesystem::path& path);
ScenarioConfig load_scenario(const std::filesystem::path& path);

}  // namespace vtmarket

#endif  // VTMARKET_SCENARIO_HPP_
