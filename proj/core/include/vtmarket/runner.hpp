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

#ifndef VTMARKET_RUNNER_HPP_
#define VTMARKET_RUNNER_HPP_

// Experiment orchestration behind the CLI: single-scenario reports, scheme
// evaluation, and sweeps over transmission cost or follower count.
// Sweep rows are independent jobs and may run on worker threads; outputs
// are merged in row order so reruns produce byte-identical files.

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vtmarket/env.hpp"
#include "vtmarket/equilibrium.hpp"
#include "vtmarket/ppo.hpp"
#include "vtmarket/scenario.hpp"

namespace vtmarket {

MigrationEnv make_env(const ScenarioConfig& config);

struct EpisodeSummary {
  double mean_price = 0.0;
  double mean_total_demand = 0.0;
  double mean_msp_utility = 0.0;
  double mean_vmu_utility = 0.0;
  double episode_return = 0.0;
  double final_price = 0.0;
};

// Plays one episode; the policy sees the environment (for its observation
// window) and returns a price per round. Trajectory rows are appended to
// `trajectory` when given.
EpisodeSummary run_episode(MigrationEnv& env, uint64_t reset_seed,
                           const std::function<double(const MigrationEnv&)>& policy,
                           std::ostream* trajectory = nullptr,
                           int episode_index = 0);

struct SchemeReport {
  Scheme scheme = Scheme::kAnalytic;
  uint64_t seed = 0;
  double price = 0.0;            // analytic price, or mean played price
  double total_bandwidth = 0.0;  // raw bandwidth units
  double msp_utility = 0.0;
  double mean_vmu_utility = 0.0;
};

// Evaluates one scheme on the scenario. analytic solves in closed form;
// greedy/random play one episode; drl trains with the configured
// hyperparameters and then plays one evaluation episode with the mean
// action. Deterministic per seed.
SchemeReport evaluate_scheme(const ScenarioConfig& config, Scheme scheme,
                             uint64_t seed);

enum class SweepAxis { kCost, kVmus };

SweepAxis parse_axis(const std::string& name);
const char* to_string(SweepAxis axis);

struct SweepOptions {
  SweepAxis axis = SweepAxis::kCost;
  std::vector<double> values;  // empty: 5..9 for cost, 1..6 for vmus
  std::vector<Scheme> schemes = {Scheme::kAnalytic, Scheme::kDrl,
                                 Scheme::kGreedy, Scheme::kRandom};
  // Stochastic schemes run once per seed (config.seed + 0..count-1);
  // analytic runs a single row.
  int stochastic_seeds = 7;
  unsigned max_workers = 0;  // 0: hardware concurrency
};

// The scenario with the axis value applied: cost overrides msp.cost; vmus
// replicates the first follower profile N times.
ScenarioConfig apply_axis(const ScenarioConfig& base, SweepAxis axis,
                          double value);

struct SweepRow {
  double axis_value = 0.0;
  Scheme scheme = Scheme::kAnalytic;
  uint64_t seed = 0;
  SchemeReport report;
  bool failed = false;
  std::string error;
};

std::vector<SweepRow> run_sweep(const ScenarioConfig& base,
                                const SweepOptions& options);

// Side-by-side scheme comparison on the scenario exactly as configured
// (no axis applied; the axis column reports the follower count).
std::vector<SweepRow> run_compare(const ScenarioConfig& config,
                                  const std::vector<Scheme>& schemes,
                                  int stochastic_seeds = 7,
                                  unsigned max_workers = 0);

// sweep CSV: axis,scheme,price,total_bandwidth_scaled,msp_utility,
// mean_vmu_utility,seed,total_bandwidth_raw (scaled = 100x raw). Failed
// rows are skipped; callers report them separately.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

// Per (axis value, scheme) aggregates: mean plus min/max of the provider
// utility across seeds.
void write_sweep_summary_csv(std::ostream& out,
                             const std::vector<SweepRow>& rows);

void print_equilibrium(const EquilibriumSolution& solution, std::ostream& out);
std::string equilibrium_to_json(const EquilibriumSolution& solution);

struct TrainingArtifacts {
  std::vector<LearningCurvePoint> curve;
  EpisodeSummary final_eval;  // drl only: mean-action evaluation episode
  std::filesystem::path curve_path;
  std::filesystem::path trajectory_path;
  std::filesystem::path checkpoint_path;  // empty for baseline schemes
};

// Runs the configured scheme (drl trains; greedy/random just play) for
// ppo.episodes episodes and writes learning_curve.csv, trajectory.csv and,
// for drl, policy.ckpt under output_dir (created if missing).
TrainingArtifacts run_training(const ScenarioConfig& config,
                               const std::filesystem::path& output_dir);

}  // namespace vtmarket

#endif  // VTMARKET_RUNNER_HPP_
