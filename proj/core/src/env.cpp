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

#include "vtmarket/env.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "vtmarket/equilibrium.hpp"

namespace vtmarket {

std::vector<double> Observation::flatten_normalized(
    const MspConfig& config) const {
  std::vector<double> features;
  if (window.empty()) {
    return features;
  }
  features.reserve(window.size() * (1 + window.front().demands.size()));
  for (const GameState& slot : window) {
    features.push_back(slot.price / config.max_price);
    for (double demand : slot.demands) {
      features.push_back(demand / config.max_bandwidth);
    }
  }
  return features;
}

MigrationEnv::MigrationEnv(std::vector<VmuProfile> profiles,
                           ChannelParams channel, MspConfig config,
                           int window_length, int rounds_per_episode)
    : profiles_(std::move(profiles)),
      channel_(channel),
      config_(config),
      window_length_(window_length),
      rounds_per_episode_(rounds_per_episode) {
  config_.validate();
  if (profiles_.empty()) {
    throw std::invalid_argument("MigrationEnv: no follower profiles");
  }
  for (const VmuProfile& profile : profiles_) {
    profile.validate();
  }
  if (window_length_ <= 0 || rounds_per_episode_ <= 0) {
    throw std::invalid_argument(
        "MigrationEnv: window_length and rounds_per_episode must be > 0");
  }
}

std::vector<double> MigrationEnv::settle_demands(double price) const {
  std::vector<double> demands;
  demands.reserve(profiles_.size());
  double total = 0.0;
  for (const VmuProfile& profile : profiles_) {
    const double response = best_response(price, profile, channel_);
    demands.push_back(response);
    total += response;
  }
  if (total > config_.max_bandwidth) {
    const double scale = config_.max_bandwidth / total;
    for (double& demand : demands) {
      demand *= scale;
    }
  }
  return demands;
}

double MigrationEnv::round_msp_utility(double price) const {
  return msp_utility(price, settle_demands(price), config_);
}

void MigrationEnv::push_window(double price, std::vector<double> demands) {
  auto& window = state_.observation.window;
  window.push_back(GameState{price, demands});
  if (static_cast<int>(window.size()) > window_length_) {
    window.erase(window.begin());
  }
  state_.state = GameState{price, std::move(demands)};
}

void MigrationEnv::reset(uint64_t seed) {
  Rng rng(seed);
  state_ = EpisodeState{};
  double best = 0.0;
  for (int i = 0; i < window_length_; ++i) {
    const double price = rng.uniform(config_.cost, config_.max_price);
    std::vector<double> demands = settle_demands(price);
    const double utility = msp_utility(price, demands, config_);
    best = (i == 0) ? utility : std::max(best, utility);
    push_window(price, std::move(demands));
  }
  state_.best_utility = best;
  state_.round = 0;
  initialized_ = true;
}

MigrationEnv::StepResult MigrationEnv::step(double price) {
  if (!initialized_) {
    throw std::logic_error("MigrationEnv::step called before reset");
  }
  if (done()) {
    throw std::logic_error("MigrationEnv::step: episode is over");
  }
  StepResult result;
  result.price = std::clamp(price, config_.cost, config_.max_price);
  result.clamped = result.price != price;
  if (result.clamped) {
    ++clamped_actions_;
  }
  std::vector<double> demands = settle_demands(result.price);
  result.msp_utility = msp_utility(result.price, demands, config_);
  result.reward = result.msp_utility >= state_.best_utility ? 1 : 0;
  state_.best_utility = std::max(state_.best_utility, result.msp_utility);
  push_window(result.price, std::move(demands));
  ++state_.round;
  return result;
}

std::vector<double> MigrationEnv::observation_features() const {
  return state_.observation.flatten_normalized(config_);
}

namespace {

void append_double(std::ostream& out, double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.10g", value);
  out << buffer;
}

}  // namespace

void write_trajectory_header(std::ostream& out, int num_vmus) {
  out << "episode,round,price";
  for (int n = 0; n < num_vmus; ++n) {
    out << ",demand_" << n;
  }
  out << ",msp_utility,best_utility,reward\n";
}

void write_trajectory_row(std::ostream& out, int episode, int round,
                          const GameState& state, double msp_utility,
                          double best_utility, int reward) {
  out << episode << ',' << round << ',';
  append_double(out, state.price);
  for (double demand : state.demands) {
    out << ',';
    append_double(out, demand);
  }
  out << ',';
  append_double(out, msp_utility);
  out << ',';
  append_double(out, best_utility);
  out << ',' << reward << '\n';
}

}  // namespace vtmarket
