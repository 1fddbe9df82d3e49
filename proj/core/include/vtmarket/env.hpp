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

#ifndef VTMARKET_ENV_HPP_
#define VTMARKET_ENV_HPP_

// The pricing agent's environment. Each episode runs a fixed number of
// rounds: the agent posts a price, followers answer with their best
// responses (proportionally rationed if they oversubscribe the bandwidth
// cap), and the agent receives a binary reward - 1 when the round's
// provider utility ties or beats the best utility seen so far in the
// episode, 0 otherwise.
//
// The agent never observes follower profiles. Its observation is a sliding
// window of the last L (price, demand-vector) pairs; on reset the window is
// seeded with uniformly random prices so that the first real round already
// sees a full history.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "vtmarket/channel.hpp"
#include "vtmarket/game.hpp"
#include "vtmarket/rng.hpp"

namespace vtmarket {

// Sliding window of the L most recent (price, demands) pairs, oldest first.
struct Observation {
  std::vector<GameState> window;

  // Flat features for the learner, all in [0, 1]: each slot contributes
  // [price / max_price, demands / max_bandwidth...]. Length L * (1 + N).
  std::vector<double> flatten_normalized(const MspConfig& config) const;
};

struct EpisodeState {
  int round = 0;
  GameState state;
  double best_utility = 0.0;
  Observation observation;
};

class MigrationEnv {
 public:
  MigrationEnv(std::vector<VmuProfile> profiles, ChannelParams channel,
               MspConfig config, int window_length, int rounds_per_episode);

  // Starts a fresh episode: fills the window with `window_length` rounds of
  // uniform prices in [cost, max_price] and the followers' settled demands,
  // and initializes the best utility to the maximum over those seed rounds.
  // Deterministic given the seed.
  void reset(uint64_t seed);

  struct StepResult {
    double price = 0.0;        // after clamping into [cost, max_price]
    double msp_utility = 0.0;
    int reward = 0;
    bool clamped = false;
  };

  // Plays one round at the given price. Prices outside the box are clamped
  // and counted. Throws std::logic_error when the episode is over.
  StepResult step(double price);

  // Follower best responses at `price`, scaled down proportionally when
  // their sum exceeds the bandwidth cap.
  std::vector<double> settle_demands(double price) const;

  // Provider utility of a round played at `price` (settled demands).
  double round_msp_utility(double price) const;

  const EpisodeState& state() const { return state_; }
  std::vector<double> observation_features() const;
  bool done() const { return state_.round >= rounds_per_episode_; }

  const std::vector<VmuProfile>& profiles() const { return profiles_; }
  const ChannelParams& channel() const { return channel_; }
  const MspConfig& config() const { return config_; }
  int num_vmus() const { return static_cast<int>(profiles_.size()); }
  int window_length() const { return window_length_; }
  int rounds_per_episode() const { return rounds_per_episode_; }
  int feature_dim() const { return window_length_ * (1 + num_vmus()); }
  // Cumulative across episodes.
  int clamped_actions() const { return clamped_actions_; }

 private:
  void push_window(double price, std::vector<double> demands);

  std::vector<VmuProfile> profiles_;
  ChannelParams channel_;
  MspConfig config_;
  int window_length_;
  int rounds_per_episode_;
  EpisodeState state_;
  int clamped_actions_ = 0;
  bool initialized_ = false;
};

// Trajectory CSV (one row per round):
// episode,round,price,demand_0..demand_{N-1},msp_utility,best_utility,reward
void write_trajectory_header(std::ostream& out, int num_vmus);
void write_trajectory_row(std::ostream& out, int episode, int round,
                          const GameState& state, double msp_utility,
                          double best_utility, int reward);

}  // namespace vtmarket

#endif  // VTMARKET_ENV_HPP_
