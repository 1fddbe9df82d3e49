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

#ifndef VTMARKET_EQUILIBRIUM_HPP_
#define VTMARKET_EQUILIBRIUM_HPP_

// Closed-form leader-follower equilibrium for the bandwidth market.
//
// Backward induction: each follower's utility is strictly concave in its
// bandwidth, so its best response to a price p is the unique stationary
// point alpha/p - D/rate_factor, floored at 0 (opt-out). Substituting the
// best responses into the provider's utility gives a strictly concave
// function of p whose stationary point has the closed form
// sqrt(cost * rate_factor * sum(alpha) / sum(D)).
//
// The closed form ignores the bandwidth cap and the price box, so solve()
// completes it: if aggregate demand at the stationary price exceeds the
// cap, the price is raised to the unique cap-clearing level (aggregate
// demand is strictly decreasing in p), and the result is clamped into
// [cost, max_price]. Followers that would demand a non-positive amount are
// treated as inactive, which makes the provider's substituted utility only
// piecewise concave; solve() therefore evaluates every piece's stationary
// point and boundary rather than trusting the full-set formula alone.

#include <span>
#include <vector>

#include "vtmarket/channel.hpp"
#include "vtmarket/game.hpp"

namespace vtmarket {

enum class ConstraintBinding { kNone, kBandwidthCap, kPriceCap };

const char* to_string(ConstraintBinding binding);

struct EquilibriumSolution {
  double price = 0.0;
  std::vector<double> demands;
  double msp_utility = 0.0;
  std::vector<double> vmu_utilities;
  ConstraintBinding constraint_binding = ConstraintBinding::kNone;
  // Set when even max_price cannot clear the bandwidth cap; demands are
  // then the raw best responses at max_price and their sum exceeds the cap.
  bool bandwidth_infeasible = false;

  double total_demand() const;
};

// Unique maximizer of the follower's utility at price p > 0:
// max(0, alpha/p - D/rate_factor). Zero means the follower opts out.
double best_response(double price, const VmuProfile& profile,
                     const ChannelParams& channel);

// Aggregate best response sum(max(0, alpha_n/p - D_n/rate_factor)).
// Strictly decreasing in p wherever it is positive.
double total_demand(double price, std::span<const VmuProfile> profiles,
                    const ChannelParams& channel);

// Stationary point of the provider's utility with every follower assumed
// active: sqrt(cost * rate_factor * sum(alpha) / sum(D)). Throws
// std::domain_error for an empty profile vector or non-positive cost.
double unconstrained_price(std::span<const VmuProfile> profiles,
                           const ChannelParams& channel, double cost);

// Price at which aggregate demand equals `target`, found by bisection to
// 1e-9 absolute (at most 200 iterations). Requires total_demand(lo) >=
// target; returns lo if the demand is already at or below target there.
double cap_clearing_price(std::span<const VmuProfile> profiles,
                          const ChannelParams& channel, double lo,
                          double target);

// Full equilibrium under the cap and the price box. The returned price
// maximizes (p - cost) * min(total_demand(p), max_bandwidth) over
// [cost, max_price]; demands are per-follower best responses at that price
// (raw, un-rationed). With zero active followers at all feasible prices the
// solution is degenerate with zero utilities.
EquilibriumSolution solve(std::span<const VmuProfile> profiles,
                          const ChannelParams& channel,
                          const MspConfig& config);

}  // namespace vtmarket

#endif  // VTMARKET_EQUILIBRIUM_HPP_
