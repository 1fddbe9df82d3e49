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

#ifndef VTMARKET_BASELINES_HPP_
#define VTMARKET_BASELINES_HPP_

// Comparison pricing schemes: uniformly random, and greedy over the prices
// tried so far.

#include <span>
#include <utility>

#include "vtmarket/game.hpp"
#include "vtmarket/rng.hpp"

namespace vtmarket {

// One observed round: the price tried and the provider utility it earned.
using PriceOutcome = std::pair<double, double>;

// Uniform sample on [cost, max_price].
double random_price(Rng& rng, const MspConfig& config);

// With probability 1 - explore_eps, the historical price with the highest
// recorded utility (earliest entry wins ties); otherwise, or when the
// history is empty, a fresh uniform sample.
double greedy_price(std::span<const PriceOutcome> history, Rng& rng,
                    const MspConfig& config, double explore_eps = 0.1);

}  // namespace vtmarket

#endif  // VTMARKET_BASELINES_HPP_
