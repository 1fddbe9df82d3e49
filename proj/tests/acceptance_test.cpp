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

// End-to-end acceptance checks for the whole artifact. Each test prints one
// PASS/FAIL line. The analytic criteria run in microseconds; the learning
// criteria train full agents and take minutes on one core.

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "vtmarket/env.hpp"
#include "vtmarket/equilibrium.hpp"
#include "vtmarket/ppo.hpp"
#include "vtmarket/rng.hpp"
#include "vtmarket/runner.hpp"
#include "vtmarket/scenario.hpp"

namespace vtmarket {
namespace {

const ChannelParams kDefaults;

// Twin sizes 200 MB and 100 MB, both immersion coefficients 5; the
// scenario behind the cost sweep and the convergence runs.
std::vector<VmuProfile> cost_sweep_profiles() {
  return {VmuProfile{5.0, 2.0}, VmuProfile{5.0, 1.0}};
}

MspConfig market_config(double cost) { return MspConfig{cost, 0.5, 50.0}; }

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("[CRITERION %d] %s - %s\n", criterion, pass ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
}

double settled_utility_ref(double price,
                           const std::vector<VmuProfile>& profiles,
                           const MspConfig& config) {
  double total = 0.0;
  for (const VmuProfile& p : profiles) {
    total += best_response(price, p, kDefaults);
  }
  return (price - config.cost) * std::min(total, config.max_bandwidth);
}

double ols_slope(const std::vector<double>& y) {
  const int n = static_cast<int>(y.size());
  const double mean_x = (n - 1) / 2.0;
  const double mean_y =
      std::accumulate(y.begin(), y.end(), 0.0) / n;
  double num = 0.0;
  double den = 0.0;
  for (int i = 0; i < n; ++i) {
    num += (i - mean_x) * (y[i] - mean_y);
    den += (i - mean_x) * (i - mean_x);
  }
  return num / den;
}

TEST(Acceptance, Criterion1_AnalyticPriceEndpoints) {
  const auto profiles = cost_sweep_profiles();
  const double p5 = unconstrained_price(profiles, kDefaults, 5.0);
  const double p9 = unconstrained_price(profiles, kDefaults, 9.0);
  const bool pass = std::abs(p5 - 25.0) <= 0.5 && std::abs(p9 - 34.0) <= 0.5;
  std::ostringstream detail;
  detail << "price(C=5) = " << p5 << " (target 25 +- 0.5), price(C=9) = "
         << p9 << " (target 34 +- 0.5)";
  report(1, pass, detail.str());
  EXPECT_TRUE(pass);
}

TEST(Acceptance, Criterion2_BandwidthTrend) {
  const auto profiles = cost_sweep_profiles();
  const double b6 =
      100.0 * solve(profiles, kDefaults, market_config(6.0)).total_demand();
  const double b8 =
      100.0 * solve(profiles, kDefaults, market_config(8.0)).total_demand();
  const bool pass = std::abs(b6 - 27.9) <= 0.5 && std::abs(b8 - 23.4) <= 0.5;
  std::ostringstream detail;
  detail << "scaled bandwidth(C=6) = " << b6
         << " (target 27.9 +- 0.5), (C=8) = " << b8 << " (target 23.4 +- 0.5)";
  report(2, pass, detail.str());
  EXPECT_TRUE(pass);
}

TEST(Acceptance, Criterion3_MspUtilityVersusFollowerCount) {
  // 100 MB twins, coefficient 5, bandwidth cap 0.5 (50 in scaled units).
  const MspConfig config = market_config(5.0);
  const EquilibriumSolution two =
      solve(std::vector<VmuProfile>(2, VmuProfile{5.0, 1.0}), kDefaults,
            config);
  const EquilibriumSolution six =
      solve(std::vector<VmuProfile>(6, VmuProfile{5.0, 1.0}), kDefaults,
            config);
  const bool pass = std::abs(two.msp_utility - 7.03) <= 0.1 &&
                    std::abs(six.msp_utility - 20.35) <= 0.2 &&
                    six.constraint_binding == ConstraintBinding::kBandwidthCap;
  std::ostringstream detail;
  detail << "U_s(N=2) = " << two.msp_utility
         << " (target 7.03 +- 0.1), U_s(N=6) = " << six.msp_utility
         << " (target 20.35 +- 0.2, cap binding: "
         << to_string(six.constraint_binding) << ")";
  report(3, pass, detail.str());
  EXPECT_TRUE(pass);
}

TEST(Acceptance, Criterion4_OracleBeatsPriceGrid) {
  Rng rng(20260801);
  int failures = 0;
  const int configs = 100;
  const int grid_points = 10000;
  for (int trial = 0; trial < configs; ++trial) {
    const int n = 1 + rng.uniform_int(6);
    std::vector<VmuProfile> profiles;
    for (int i = 0; i < n; ++i) {
      profiles.push_back(
          VmuProfile{rng.uniform(5.0, 20.0), rng.uniform(1.0, 3.0)});
    }
    const MspConfig config{rng.uniform(2.0, 10.0), rng.uniform(0.2, 1.0),
                           rng.uniform(30.0, 50.0)};
    const EquilibriumSolution sol = solve(profiles, kDefaults, config);
    const auto oracle = testing::grid_max(
        [&](double p) { return settled_utility_ref(p, profiles, config); },
        config.cost, config.max_price, grid_points);
    if (sol.msp_utility + 1e-9 < oracle.value) {
      ++failures;
      continue;
    }
    // Uniqueness up to grid resolution: near-optimal prices cluster.
    int lo = oracle.index;
    int hi = oracle.index;
    for (int i = 0; i < grid_points; ++i) {
      const double p = config.cost + (config.max_price - config.cost) * i /
                                         (grid_points - 1);
      if (settled_utility_ref(p, profiles, config) >= oracle.value - 1e-9) {
        lo = std::min(lo, i);
        hi = std::max(hi, i);
      }
    }
    if (hi - lo > 3) {
      ++failures;
    }
  }
  const bool pass = failures == 0;
  std::ostringstream detail;
  detail << configs << " random configs vs " << grid_points
         << "-point price grids, " << failures << " violations";
  report(4, pass, detail.str());
  EXPECT_TRUE(pass);
}

TEST(Acceptance, Criterion5_FollowerOptimality) {
  Rng rng(20260802);
  int failures = 0;
  const int cases = 100;
  const int grid_points = 10000;
  for (int trial = 0; trial < cases; ++trial) {
    const VmuProfile profile{rng.uniform(5.0, 20.0), rng.uniform(1.0, 3.0)};
    const double price = rng.uniform(5.0, 50.0);
    const double response = best_response(price, profile, kDefaults);
    if (response > 0.0) {
      const auto oracle = testing::grid_max(
          [&](double b) {
            return vmu_utility(profile, b, price, kDefaults);
          },
          1e-9, 2.0 * response + 0.05, grid_points);
      if (vmu_utility(profile, response, price, kDefaults) + 1e-9 <
          oracle.value) {
        ++failures;
      }
      const double derivative = testing::central_diff(
          [&](double b) {
            return vmu_utility(profile, b, price, kDefaults);
          },
          response, 1e-6);
      // Relative to the price scale: both first-order terms equal the
      // price at the interior optimum.
      if (std::abs(derivative) > 1e-4 * price) {
        ++failures;
      }
    } else {
      // Opt-out: no positive bandwidth earns positive utility.
      const auto oracle = testing::grid_max(
          [&](double b) {
            return vmu_utility(profile, b, price, kDefaults);
          },
          1e-9, 1.0, grid_points);
      if (oracle.value > 1e-9) {
        ++failures;
      }
    }
  }
  const bool pass = failures == 0;
  std::ostringstream detail;
  detail << cases << " random (profile, price) pairs vs " << grid_points
         << "-point bandwidth grids, " << failures << " violations";
  report(5, pass, detail.str());
  EXPECT_TRUE(pass);
}

TEST(Acceptance, Criterion6_PpoMachinery) {
  bool pass = true;
  std::ostringstream detail;

  // Clip function pointwise.
  Rng rng(20260803);
  for (int i = 0; i < 1000 && pass; ++i) {
    const double r = rng.uniform(0.0, 3.0);
    const double eps = rng.uniform(0.01, 0.9);
    const double expected =
        r < 1.0 - eps ? 1.0 - eps : (r > 1.0 + eps ? 1.0 + eps : r);
    pass = clip_ratio(r, eps) == expected;
  }
  detail << "clip pointwise " << (pass ? "ok" : "FAILED");

  // Ratios exactly 1 at the sampling parameters.
  PolicyNetwork net(12, {64, 64}, 5.0, 50.0, -0.5, 99);
  std::vector<Transition> batch;
  for (int i = 0; i < 8; ++i) {
    Transition tr;
    tr.observation.resize(12);
    tr.next_observation.resize(12);
    for (double& v : tr.observation) v = rng.uniform();
    for (double& v : tr.next_observation) v = rng.uniform();
    const ActResult act = net.act(tr.observation, rng);
    tr.presquash = act.presquash;
    tr.action_price = act.price;
    tr.log_prob = act.log_prob;
    tr.value = act.value;
    tr.reward = i % 3 == 0 ? 1.0 : 0.0;
    batch.push_back(std::move(tr));
  }
  std::vector<int> indices(8);
  std::iota(indices.begin(), indices.end(), 0);
  PpoHyperparams hp;
  hp.normalize_advantages = false;
  std::vector<double> ones(8, 1.0);
  std::vector<double> returns(8, 0.5);
  const LossDiagnostics at_old =
      ppo_loss(net, batch, indices, ones, returns, hp, {});
  const bool ratio_ok = at_old.mean_ratio == 1.0 && at_old.max_ratio == 1.0;
  pass = pass && ratio_ok;
  detail << ", ratio==1 at theta_old " << (ratio_ok ? "ok" : "FAILED");

  // GAE at lambda=1 against the brute-force discounted sum.
  bool gae_ok = true;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> rewards(10);
    std::vector<double> values(10);
    for (int i = 0; i < 10; ++i) {
      rewards[i] = rng.uniform() < 0.5 ? 1.0 : 0.0;
      values[i] = rng.uniform(-1.0, 2.0);
    }
    const double terminal = rng.uniform(-1.0, 2.0);
    const double gamma = rng.uniform(0.5, 1.0);
    const auto [adv, targets] =
        gae_advantages(rewards, values, terminal, gamma, 1.0);
    const auto oracle =
        testing::brute_force_advantages(rewards, values, terminal, gamma);
    for (int i = 0; i < 10; ++i) {
      gae_ok = gae_ok && std::abs(adv[i] - oracle[i]) <= 1e-10;
    }
  }
  pass = pass && gae_ok;
  detail << ", gae lambda=1 " << (gae_ok ? "ok" : "FAILED");

  // Loss gradients against central finite differences on a frozen batch.
  PolicyNetwork perturbed = net;
  for (double& p : perturbed.mutable_params()) {
    p += rng.uniform(-0.01, 0.01);
  }
  std::vector<double> advantages(8);
  for (double& a : advantages) a = rng.uniform(-2.0, 2.0);
  PpoHyperparams hp_grad;  // defaults, normalization on
  std::vector<double> grad(perturbed.param_count(), 0.0);
  ppo_loss(perturbed, batch, indices, advantages, returns, hp_grad, grad);
  bool grad_ok = true;
  double worst = 0.0;
  PolicyNetwork probe = perturbed;
  for (int i = 0; i < probe.param_count(); ++i) {
    const double saved = probe.mutable_params()[i];
    const double h = 1e-5 * std::max(1.0, std::abs(saved));
    probe.mutable_params()[i] = saved + h;
    const double up =
        ppo_loss(probe, batch, indices, advantages, returns, hp_grad, {})
            .total;
    probe.mutable_params()[i] = saved - h;
    const double down =
        ppo_loss(probe, batch, indices, advantages, returns, hp_grad, {})
            .total;
    probe.mutable_params()[i] = saved;
    const double fd = (up - down) / (2.0 * h);
    const double err =
        std::abs(grad[i] - fd) / std::max({1.0, std::abs(fd)});
    worst = std::max(worst, err);
    grad_ok = grad_ok && err <= 1e-4;
  }
  pass = pass && grad_ok;
  detail << ", grad-vs-fd worst rel err " << worst
         << (grad_ok ? " ok" : " FAILED");

  report(6, pass, detail.str());
  EXPECT_TRUE(pass);
}

TEST(Acceptance, Criterion7_DrlConvergence) {
  const auto profiles = cost_sweep_profiles();
  const MspConfig config = market_config(5.0);
  const EquilibriumSolution oracle = solve(profiles, kDefaults, config);
  const double target = 0.95 * oracle.msp_utility;
  const PpoHyperparams hp;  // E=500, K=100, L=4, |I|=20, M=10, lr=1e-5

  int seeds_passed = 0;
  std::ostringstream detail;
  detail << "target " << target << " (95% of " << oracle.msp_utility << ");";
  for (uint64_t seed = 1; seed <= 7; ++seed) {
    const TrainResult result = train(profiles, kDefaults, config, hp, seed);
    double tail_utility = 0.0;
    for (size_t i = result.curve.size() - 50; i < result.curve.size(); ++i) {
      tail_utility += result.curve[i].mean_msp_utility;
    }
    tail_utility /= 50.0;
    std::vector<double> returns;
    returns.reserve(result.curve.size());
    for (const LearningCurvePoint& point : result.curve) {
      returns.push_back(point.episode_return);
    }
    const double slope = ols_slope(returns);
    const bool utility_ok = tail_utility >= target;
    const bool trend_ok = slope >= -0.005;  // non-decreasing within noise
    if (utility_ok && trend_ok) {
      ++seeds_passed;
    }
    detail << " seed " << seed << ": tail U_s " << tail_utility << " ("
           << (utility_ok ? "ok" : "low") << "), return slope " << slope
           << " (" << (trend_ok ? "ok" : "down") << ");";
  }
  const bool pass = seeds_passed >= 5;
  detail << " " << seeds_passed << "/7 seeds passed (need 5)";
  report(7, pass, detail.str());
  EXPECT_TRUE(pass);
}

TEST(Acceptance, Criterion8_BaselineOrdering) {
  ScenarioConfig config = two_vmu_scenario();
  config.seed = 1;
  SweepOptions options;
  options.axis = SweepAxis::kCost;
  options.schemes = {Scheme::kDrl, Scheme::kGreedy, Scheme::kRandom};
  options.stochastic_seeds = 7;
  const std::vector<SweepRow> rows = run_sweep(config, options);

  bool pass = true;
  std::ostringstream detail;
  for (double cost = 5.0; cost <= 9.0; cost += 1.0) {
    double drl = 0.0;
    double greedy = 0.0;
    double random = 0.0;
    int count = 0;
    for (const SweepRow& row : rows) {
      if (row.axis_value != cost) continue;
      ASSERT_FALSE(row.failed) << row.error;
      if (row.scheme == Scheme::kDrl) {
        drl += row.report.msp_utility;
        ++count;
      } else if (row.scheme == Scheme::kGreedy) {
        greedy += row.report.msp_utility;
      } else if (row.scheme == Scheme::kRandom) {
        random += row.report.msp_utility;
      }
    }
    drl /= 7.0;
    greedy /= 7.0;
    random /= 7.0;
    ASSERT_EQ(count, 7);
    const bool ordered = drl >= greedy && greedy >= random;
    pass = pass && ordered;
    detail << " C=" << cost << ": drl " << drl << " >= greedy " << greedy
           << " >= random " << random << (ordered ? " ok;" : " VIOLATED;");
  }
  report(8, pass, detail.str());
  EXPECT_TRUE(pass);

  // The learned scheme never beats the analytic ceiling.
  for (const SweepRow& row : rows) {
    if (row.scheme != Scheme::kDrl || row.failed) continue;
    const ScenarioConfig at_cost =
        apply_axis(config, SweepAxis::kCost, row.axis_value);
    const EquilibriumSolution ceiling =
        solve(at_cost.vmus, at_cost.channel, at_cost.msp);
    EXPECT_LE(row.report.msp_utility, ceiling.msp_utility + 1e-9);
  }
}

TEST(Acceptance, Criterion9_EnvironmentInvariants) {
  bool pass = true;
  std::ostringstream detail;

  MigrationEnv env(cost_sweep_profiles(), kDefaults, market_config(5.0), 4,
                   100);
  // Best-utility monotonicity across a scripted episode.
  env.reset(17);
  double best = env.state().best_utility;
  bool monotone = true;
  const double script[] = {7.0,  45.0, 25.0, 12.0, 30.0, 25.3,
                           25.3, 49.0, 18.0, 26.0, 24.0, 25.5};
  for (double p : script) {
    env.step(p);
    monotone = monotone && env.state().best_utility >= best;
    best = env.state().best_utility;
  }
  pass = pass && monotone;
  detail << "U_best monotone " << (monotone ? "ok" : "FAILED");

  // Tie rule: repeating a price re-earns the reward through >=.
  env.reset(18);
  const double strong = solve(env.profiles(), kDefaults, env.config()).price;
  env.step(strong);
  const bool tie_ok = env.step(strong).reward == 1;
  pass = pass && tie_ok;
  detail << ", tie rule " << (tie_ok ? "ok" : "FAILED");

  // Shift register: the window holds the last L rounds in order.
  env.reset(19);
  const double feed[] = {6.0, 7.5, 9.0, 10.5, 12.0, 13.5};
  for (double p : feed) env.step(p);
  const auto& window = env.state().observation.window;
  bool shift_ok = window.size() == 4;
  for (size_t i = 0; shift_ok && i < 4; ++i) {
    shift_ok = window[i].price == feed[i + 2];
  }
  pass = pass && shift_ok;
  detail << ", shift register " << (shift_ok ? "ok" : "FAILED");

  report(9, pass, detail.str());
  EXPECT_TRUE(pass);
}

}  // namespace
}  // namespace vtmarket
