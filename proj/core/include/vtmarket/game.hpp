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

#ifndef VTMARKET_GAME_HPP_
#define VTMARKET_GAME_HPP_

// Players and payoffs of the bandwidth market. The provider (leader) posts
// a unit price p in [cost, max_price]; each follower buys bandwidth b_n to
// migrate a twin of size D_n and earns an immersion payoff
// alpha_n * ln(1 + 1/aotm) minus the payment p * b_n. The provider earns
// (p - cost) * sum(b_n). All utilities are computed in double precision;
// nothing in this module rounds.
//
// A follower whose best response would be non-positive opts out: it demands
// b = 0 and contributes zero to both sides' utilities. Helper functions
// below encode that convention; the raw utility functions themselves reject
// b <= 0.

#include <span>
#include <vector>

#include "vtmarket/channel.hpp"

namespace vtmarket {

// One follower: unit immersion profit and twin size (100 MB units).
struct VmuProfile {
  double alpha = 0.0;
  double data_size = 0.0;

  // Throws std::invalid_argument unless both fields are finite and > 0.
  void validate() const;

  bool operator==(const VmuProfile&) const = default;
};

// Leader-side constants: unit transmission cost, bandwidth cap (same units
// as b) and price cap. Feasible prices satisfy 0 < cost <= p <= max_price.
struct MspConfig {
  double cost = 0.0;
  double max_bandwidth = 0.0;
  double max_price = 0.0;

  void validate() const;

  bool operator==(const MspConfig&) const = default;
};

// Current market outcome: posted price and one demand per follower
// (0 encodes opt-out).
struct GameState {
  double price = 0.0;
  std::vector<double> demands;

  bool operator==(const GameState&) const = default;
};

// Immersion payoff alpha * ln(1 + rate_factor * b / D). Strictly increasing
// and strictly concave in b. Throws std::domain_error for b <= 0.
double immersion(const VmuProfile& profile, double bandwidth,
                 const ChannelParams& channel);

// Follower utility: immersion minus payment p * b.
// Throws std::domain_error unless b > 0 and p > 0.
double vmu_utility(const VmuProfile& profile, double bandwidth, double price,
                   const ChannelParams& channel);

// Provider utility (p - cost) * sum(demands). Zero margin or an all-zero
// demand vector gives exactly 0. Throws std::domain_error when p < cost.
double msp_utility(double price, std::span<const double> demands,
                   const MspConfig& config);

// Per-follower utilities under the opt-out convention: entries with zero
// demand get exactly 0 instead of a domain error.
std::vector<double> per_vmu_utilities(std::span<const VmuProfile> profiles,
                                      std::span<const double> demands,
                                      double price,
                                      const ChannelParams& channel);

}  // namespace vtmarket

#endif  // VTMARKET_GAME_HPP_
