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

#include "vtmarket/game.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace vtmarket {

void VmuProfile::validate() const {
  if (!std::isfinite(alpha) || alpha <= 0.0) {
    throw std::invalid_argument("VmuProfile: alpha must be > 0, got " +
                                std::to_string(alpha));
  }
  if (!std::isfinite(data_size) || data_size <= 0.0) {
    throw std::invalid_argument("VmuProfile: data_size must be > 0, got " +
                                std::to_string(data_size));
  }
}

void MspConfig::validate() const {
  if (!std::isfinite(cost) || cost <= 0.0) {
    throw std::invalid_argument("MspConfig: cost must be > 0, got " +
                                std::to_string(cost));
  }
  if (!std::isfinite(max_price) || max_price < cost) {
    throw std::invalid_argument(
        "MspConfig: max_price must satisfy cost <= max_price, got cost=" +
        std::to_string(cost) + " max_price=" + std::to_string(max_price));
  }
  if (!std::isfinite(max_bandwidth) || max_bandwidth <= 0.0) {
    throw std::invalid_argument("MspConfig: max_bandwidth must be > 0, got " +
                                std::to_string(max_bandwidth));
  }
}

double immersion(const VmuProfile& profile, double bandwidth,
                 const ChannelParams& channel) {
  if (!(bandwidth > 0.0)) {
    throw std::domain_error("immersion: bandwidth must be > 0, got " +
                            std::to_string(bandwidth));
  }
  // alpha * ln(1 + 1/aotm) with aotm = D / (b * rate_factor).
  return profile.alpha *
         std::log1p(channel.rate_factor() * bandwidth / profile.data_size);
}

double vmu_utility(const VmuProfile& profile, double bandwidth, double price,
                   const ChannelParams& channel) {
  if (!(price > 0.0)) {
    throw std::domain_error("vmu_utility: price must be > 0, got " +
                            std::to_string(price));
  }
  return immersion(profile, bandwidth, channel) - price * bandwidth;
}

double msp_utility(double price, std::span<const double> demands,
                   const MspConfig& config) {
  if (price < config.cost) {
    throw std::domain_error("msp_utility: price " + std::to_string(price) +
                            " below cost " + std::to_string(config.cost));
  }
  const double total =
      std::accumulate(demands.begin(), demands.end(), 0.0);
  return (price - config.cost) * total;
}

std::vector<double> per_vmu_utilities(std::span<const VmuProfile> profiles,
                                      std::span<const double> demands,
                                      double price,
                                      const ChannelParams& channel) {
  if (profiles.size() != demands.size()) {
    throw std::invalid_argument(
        "per_vmu_utilities: profiles and demands lengths differ");
  }
  std::vector<double> utilities(profiles.size(), 0.0);
  for (size_t n = 0; n < profiles.size(); ++n) {
    if (demands[n] > 0.0) {
      utilities[n] = vmu_utility(profiles[n], demands[n], price, channel);
    }
  }
  return utilities;
}

}  // namespace vtmarket
