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

#include "vtmarket/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace vtmarket {

namespace {

constexpr double kPriceTol = 1e-9;   // bisection tolerance on price
constexpr int kMaxBisectIters = 200;
constexpr double kCapSlack = 1e-9;

// Price above which follower n opts out: best_response(p) > 0 iff
// p < alpha * rate_factor / D.
double dropout_price(const VmuProfile& profile, const ChannelParams& channel) {
  return profile.alpha * channel.rate_factor() / profile.data_size;
}

// Provider utility with demand rationed at the cap.
double settled_utility(double price, std::span<const VmuProfile> profiles,
                       const ChannelParams& channel, const MspConfig& config) {
  const double demand =
      std::min(total_demand(price, profiles, channel), config.max_bandwidth);
  return (price - config.cost) * demand;
}

// d/dp of (p - cost) * total_demand(p) on the smooth piece containing p
// (followers exactly at their dropout price count as inactive).
double uncapped_utility_slope(double price,
                              std::span<const VmuProfile> profiles,
                              const ChannelParams& channel, double cost) {
  const double rf = channel.rate_factor();
  double slope = 0.0;
  for (const VmuProfile& profile : profiles) {
    if (profile.alpha / price - profile.data_size / rf > 0.0) {
      slope += profile.alpha / price - profile.data_size / rf +
               (price - cost) * (-profile.alpha / (price * price));
    }
  }
  return slope;
}

}  // namespace

const char* to_string(ConstraintBinding binding) {
  switch (binding) {
    case ConstraintBinding::kNone:
      return "none";
    case ConstraintBinding::kBandwidthCap:
      return "bandwidth_cap";
    case ConstraintBinding::kPriceCap:
      return "price_cap";
  }
  return "unknown";
}

double EquilibriumSolution::total_demand() const {
  return std::accumulate(demands.begin(), demands.end(), 0.0);
}

double best_response(double price, const VmuProfile& profile,
                     const ChannelParams& channel) {
  return std::max(0.0, profile.alpha / price -
                           profile.data_size / channel.rate_factor());
}

double total_demand(double price, std::span<const VmuProfile> profiles,
                    const ChannelParams& channel) {
  double total = 0.0;
  for (const VmuProfile& profile : profiles) {
    total += best_response(price, profile, channel);
  }
  return total;
}

double unconstrained_price(std::span<const VmuProfile> profiles,
                           const ChannelParams& channel, double cost) {
  if (profiles.empty()) {
    throw std::domain_error("unconstrained_price: no follower profiles");
  }
  if (!(cost > 0.0)) {
    throw std::domain_error("unconstrained_price: cost must be > 0");
  }
  double sum_alpha = 0.0;
  double sum_data = 0.0;
  for (const VmuProfile& profile : profiles) {
    profile.validate();
    sum_alpha += profile.alpha;
    sum_data += profile.data_size;
  }
  return std::sqrt(cost * channel.rate_factor() * sum_alpha / sum_data);
}

double cap_clearing_price(std::span<const VmuProfile> profiles,
                          const ChannelParams& channel, double lo,
                          double target) {
  if (total_demand(lo, profiles, channel) <= target) {
    return lo;
  }
  double hi = lo;
  for (const VmuProfile& profile : profiles) {
    hi = std::max(hi, dropout_price(profile, channel));
  }
  // Demand is 0 at hi, above target at lo; bisect the crossing.
  for (int iter = 0; iter < kMaxBisectIters && hi - lo > kPriceTol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (total_demand(mid, profiles, channel) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

EquilibriumSolution solve(std::span<const VmuProfile> profiles,
                          const ChannelParams& channel,
                          const MspConfig& config) {
  config.validate();
  if (profiles.empty()) {
    throw std::domain_error("solve: no follower profiles");
  }
  for (const VmuProfile& profile : profiles) {
    profile.validate();
  }
  const double rf = channel.rate_factor();
  const double cost = config.cost;
  const double pmax = config.max_price;

  // Piece boundaries of the substituted utility: follower dropout prices
  // inside the price box.
  std::vector<double> boundaries = {cost, pmax};
  for (const VmuProfile& profile : profiles) {
    const double p_out = dropout_price(profile, channel);
    if (p_out > cost && p_out < pmax) {
      boundaries.push_back(p_out);
    }
  }
  std::sort(boundaries.begin(), boundaries.end());

  std::vector<double> candidates = boundaries;
  // Stationary point of each piece, clamped into the piece. The active set
  // is constant on the open interval, so classify with the midpoint.
  for (size_t i = 0; i + 1 < boundaries.size(); ++i) {
    const double lo = boundaries[i];
    const double hi = boundaries[i + 1];
    const double mid = 0.5 * (lo + hi);
    double sum_alpha = 0.0;
    double sum_data = 0.0;
    for (const VmuProfile& profile : profiles) {
      if (dropout_price(profile, channel) > mid) {
        sum_alpha += profile.alpha;
        sum_data += profile.data_size;
      }
    }
    if (sum_alpha > 0.0) {
      const double stationary = std::sqrt(cost * rf * sum_alpha / sum_data);
      candidates.push_back(std::clamp(stationary, lo, hi));
    }
  }

  // Cap-clearing price, if the cap can bind inside the box.
  double clearing = -1.0;
  const bool cap_reachable =
      total_demand(cost, profiles, channel) > config.max_bandwidth + kCapSlack;
  if (cap_reachable) {
    clearing =
        cap_clearing_price(profiles, channel, cost, config.max_bandwidth);
    if (clearing <= pmax) {
      candidates.push_back(clearing);
    }
  }

  // The settled utility (p - cost) * min(total_demand, cap) attains its
  // maximum at one of the candidates; ties resolve to the lowest price.
  std::sort(candidates.begin(), candidates.end());
  double best_price = cost;
  double best_value = settled_utility(cost, profiles, channel, config);
  for (double p : candidates) {
    const double value = settled_utility(p, profiles, channel, config);
    if (value > best_value + kCapSlack) {
      best_value = value;
      best_price = p;
    }
  }

  EquilibriumSolution solution;
  solution.price = best_price;
  solution.demands.reserve(profiles.size());
  for (const VmuProfile& profile : profiles) {
    solution.demands.push_back(best_response(best_price, profile, channel));
  }
  const double total = solution.total_demand();
  solution.bandwidth_infeasible = total > config.max_bandwidth + kCapSlack;
  solution.msp_utility = msp_utility(best_price, solution.demands, config);
  solution.vmu_utilities =
      per_vmu_utilities(profiles, solution.demands, best_price, channel);

  if (solution.bandwidth_infeasible) {
    // Even max_price cannot clear the cap; report the box edge.
    solution.constraint_binding = ConstraintBinding::kPriceCap;
  } else if (cap_reachable && clearing <= pmax &&
             std::abs(best_price - clearing) <=
                 kPriceTol * std::max(1.0, clearing)) {
    solution.constraint_binding = ConstraintBinding::kBandwidthCap;
  } else if (pmax - best_price <= kPriceTol * std::max(1.0, pmax) &&
             uncapped_utility_slope(pmax, profiles, channel, cost) > 0.0) {
    solution.constraint_binding = ConstraintBinding::kPriceCap;
  } else {
    solution.constraint_binding = ConstraintBinding::kNone;
  }
  return solution;
}

}  // namespace vtmarket
