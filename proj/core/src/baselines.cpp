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

#include "vtmarket/baselines.hpp"

namespace vtmarket {

double random_price(Rng& rng, const MspConfig& config) {
  return rng.uniform(config.cost, config.max_price);
}

double greedy_price(std::span<const PriceOutcome> history, Rng& rng,
                    const MspConfig& config, double explore_eps) {
  if (history.empty() || rng.uniform() < explore_eps) {
    return random_price(rng, config);
  }
  const PriceOutcome* best = &history.front();
  for (const PriceOutcome& entry : history) {
    if (entry.second > best->second) {
      best = &entry;
    }
  }
  return best->first;
}

}  // namespace vtmarket
