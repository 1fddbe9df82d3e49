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

#include "vtmarket/runner.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "vtmarket/baselines.hpp"

namespace vtmarket {

namespace {

double mean_of(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

// Deterministic per-purpose seed derivation.
uint64_t mix_seed(uint64_t seed, uint64_t salt) {
  Rng rng(seed ^ (salt * 0x9E3779B97F4A7C15ULL));
  return rng.next_u64();
}

void append_double(std::ostream& out, double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.10g", value);
  out << buffer;
}

}  // namespace

MigrationEnv make_env(const ScenarioConfig& config) {
  return MigrationEnv(config.vmus, config.channel, config.msp,
                      config.ppo.window, config.ppo.rounds_per_episode);
}

EpisodeSummary run_episode(
    MigrationEnv& env, uint64_t reset_seed,
    const std::function<double(const MigrationEnv&)>& policy,
    std::ostream* trajectory, int episode_index) {
  env.reset(reset_seed);
  EpisodeSummary summary;
  const int rounds = env.rounds_per_episode();
  for (int round = 0; round < rounds; ++round) {
    const MigrationEnv::StepResult step = env.step(policy(env));
    const GameState& played = env.state().state;
    const double total =
        std::accumulate(played.demands.begin(), played.demands.end(), 0.0);
    const std::vector<double> utilities = per_vmu_utilities(
        env.profiles(), played.demands, step.price, env.channel());
    summary.mean_price += step.price;
    summary.mean_total_demand += total;
    summary.mean_msp_utility += step.msp_utility;
    summary.mean_vmu_utility += mean_of(utilities);
    summary.episode_return += step.reward;
    summary.final_price = step.price;
    if (trajectory) {
      write_trajectory_row(*trajectory, episode_index, round, played,
                           step.msp_utility, env.state().best_utility,
                           step.reward);
    }
  }
  summary.mean_price /= rounds;
  summary.mean_total_demand /= rounds;
  summary.mean_msp_utility /= rounds;
  summary.mean_vmu_utility /= rounds;
  return summary;
}

namespace {

// Greedy exploits the best (price, utility) pair seen so far, including the
// seed rounds already in the observation window after reset.
std::function<double(const MigrationEnv&)> make_greedy_policy(
    const ScenarioConfig& config, Rng& rng) {
  auto history = std::make_shared<std::vector<PriceOutcome>>();
  const double eps = config.greedy_explore_eps;
  return [history, &rng, eps](const MigrationEnv& env) {
    const MspConfig& msp = env.config();
    auto outcome = [&msp](const GameState& state) {
      const double total = std::accumulate(state.demands.begin(),
                                           state.demands.end(), 0.0);
      return PriceOutcome{state.price, (state.price - msp.cost) * total};
    };
    if (history->empty()) {
      for (const GameState& slot : env.state().observation.window) {
        history->push_back(outcome(slot));
      }
    } else {
      history->push_back(outcome(env.state().state));
    }
    return greedy_price(*history, rng, msp, eps);
  };
}

SchemeReport report_from_summary(Scheme scheme, uint64_t seed,
                                 const EpisodeSummary& summary) {
  SchemeReport report;
  report.scheme = scheme;
  report.seed = seed;
  report.price = summary.mean_price;
  report.total_bandwidth = summary.mean_total_demand;
  report.msp_utility = summary.mean_msp_utility;
  report.mean_vmu_utility = summary.mean_vmu_utility;
  return report;
}

}  // namespace

SchemeReport evaluate_scheme(const ScenarioConfig& config, Scheme scheme,
                             uint64_t seed) {
  config.validate();
  switch (scheme) {
    case Scheme::kAnalytic: {
      const EquilibriumSolution solution =
          solve(config.vmus, config.channel, config.msp);
      SchemeReport report;
      report.scheme = scheme;
      report.seed = seed;
      report.price = solution.price;
      report.total_bandwidth = solution.total_demand();
      report.msp_utility = solution.msp_utility;
      report.mean_vmu_utility = mean_of(solution.vmu_utilities);
      return report;
    }
    case Scheme::kRandom: {
      MigrationEnv env = make_env(config);
      Rng rng(mix_seed(seed, 1));
      const EpisodeSummary summary = run_episode(
          env, mix_seed(seed, 0),
          [&rng](const MigrationEnv& e) { return random_price(rng, e.config()); });
      return report_from_summary(scheme, seed, summary);
    }
    case Scheme::kGreedy: {
      MigrationEnv env = make_env(config);
      Rng rng(mix_seed(seed, 1));
      const EpisodeSummary summary =
          run_episode(env, mix_seed(seed, 0), make_greedy_policy(config, rng));
      return report_from_summary(scheme, seed, summary);
    }
    case Scheme::kDrl: {
      const TrainResult trained =
          train(config.vmus, config.channel, config.msp, config.ppo, seed);
      MigrationEnv env = make_env(config);
      const EpisodeSummary summary = run_episode(
          env, mix_seed(seed, 2), [&trained](const MigrationEnv& e) {
            return trained.policy.mean_action(e.observation_features());
          });
      return report_from_summary(scheme, seed, summary);
    }
  }
  throw std::logic_error("evaluate_scheme: unknown scheme");
}

SweepAxis parse_axis(const std::string& name) {
  if (name == "cost") return SweepAxis::kCost;
  if (name == "vmus") return SweepAxis::kVmus;
  throw ConfigError("unknown sweep axis '" + name +
                    "' (expected cost or vmus)");
}

const char* to_string(SweepAxis axis) {
  return axis == SweepAxis::kCost ? "cost" : "vmus";
}

ScenarioConfig apply_axis(const ScenarioConfig& base, SweepAxis axis,
                          double value) {
  ScenarioConfig config = base;
  if (axis == SweepAxis::kCost) {
    config.msp.cost = value;
  } else {
    const int count = static_cast<int>(std::lround(value));
    if (count < 1) {
      throw ConfigError("vmus axis value must be >= 1");
    }
    if (base.vmus.empty()) {
      throw ConfigError("vmus axis needs a template follower profile");
    }
    config.vmus.assign(count, base.vmus.front());
  }
  return config;
}

namespace {

// Rows are independent; workers pull from a shared index and write disjoint
// slots, so the merged result does not depend on scheduling.
void execute_rows(std::vector<SweepRow>& rows,
                  const std::function<ScenarioConfig(const SweepRow&)>& config_for,
                  unsigned max_workers) {
  std::atomic<size_t> next{0};
  auto work = [&]() {
    for (size_t i; (i = next.fetch_add(1)) < rows.size();) {
      SweepRow& row = rows[i];
      try {
        row.report = evaluate_scheme(config_for(row), row.scheme, row.seed);
      } catch (const std::exception& error) {
        row.failed = true;
        row.error = error.what();
      }
    }
  };
  unsigned workers = max_workers;
  if (workers == 0) {
    workers = std::max(1u, std::thread::hardware_concurrency());
  }
  workers = std::min<unsigned>(workers, rows.size());
  std::vector<std::thread> threads;
  for (unsigned t = 1; t < workers; ++t) {
    threads.emplace_back(work);
  }
  work();
  for (std::thread& thread : threads) {
    thread.join();
  }
}

}  // namespace

std::vector<SweepRow> run_sweep(const ScenarioConfig& base,
                                const SweepOptions& options) {
  base.validate();
  std::vector<double> values = options.values;
  if (values.empty()) {
    values = options.axis == SweepAxis::kCost
                 ? std::vector<double>{5, 6, 7, 8, 9}
                 : std::vector<double>{1, 2, 3, 4, 5, 6};
  }

  std::vector<SweepRow> rows;
  for (double value : values) {
    for (Scheme scheme : options.schemes) {
      const int copies =
          scheme == Scheme::kAnalytic ? 1 : options.stochastic_seeds;
      for (int i = 0; i < copies; ++i) {
        SweepRow row;
        row.axis_value = value;
        row.scheme = scheme;
        row.seed = base.seed + static_cast<uint64_t>(i);
        rows.push_back(row);
      }
    }
  }
  execute_rows(rows,
               [&base, &options](const SweepRow& row) {
                 return apply_axis(base, options.axis, row.axis_value);
               },
               options.max_workers);
  return rows;
}

std::vector<SweepRow> run_compare(const ScenarioConfig& config,
                                  const std::vector<Scheme>& schemes,
                                  int stochastic_seeds, unsigned max_workers) {
  config.validate();
  std::vector<SweepRow> rows;
  for (Scheme scheme : schemes) {
    const int copies = scheme == Scheme::kAnalytic ? 1 : stochastic_seeds;
    for (int i = 0; i < copies; ++i) {
      SweepRow row;
      row.axis_value = static_cast<double>(config.vmus.size());
      row.scheme = scheme;
      row.seed = config.seed + static_cast<uint64_t>(i);
      rows.push_back(row);
    }
  }
  execute_rows(rows, [&config](const SweepRow&) { return config; },
               max_workers);
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "axis,scheme,price,total_bandwidth_scaled,msp_utility,"
         "mean_vmu_utility,seed,total_bandwidth_raw\n";
  for (const SweepRow& row : rows) {
    if (row.failed) continue;
    append_double(out, row.axis_value);
    out << ',' << to_string(row.scheme) << ',';
    append_double(out, row.report.price);
    out << ',';
    append_double(out, 100.0 * row.report.total_bandwidth);
    out << ',';
    append_double(out, row.report.msp_utility);
    out << ',';
    append_double(out, row.report.mean_vmu_utility);
    out << ',' << row.seed << ',';
    append_double(out, row.report.total_bandwidth);
    out << '\n';
  }
}

void write_sweep_summary_csv(std::ostream& out,
                             const std::vector<SweepRow>& rows) {
  struct Group {
    int count = 0;
    double price = 0.0;
    double bandwidth = 0.0;
    double vmu = 0.0;
    double utility = 0.0;
    double utility_min = 0.0;
    double utility_max = 0.0;
  };
  std::map<std::pair<double, std::string>, Group> groups;
  for (const SweepRow& row : rows) {
    if (row.failed) continue;
    Group& g = groups[{row.axis_value, to_string(row.scheme)}];
    const double u = row.report.msp_utility;
    if (g.count == 0) {
      g.utility_min = u;
      g.utility_max = u;
    }
    g.utility_min = std::min(g.utility_min, u);
    g.utility_max = std::max(g.utility_max, u);
    g.price += row.report.price;
    g.bandwidth += row.report.total_bandwidth;
    g.vmu += row.report.mean_vmu_utility;
    g.utility += u;
    ++g.count;
  }
  out << "axis,scheme,rows,price_mean,total_bandwidth_scaled_mean,"
         "msp_utility_mean,msp_utility_min,msp_utility_max,"
         "mean_vmu_utility_mean\n";
  for (const auto& [key, g] : groups) {
    append_double(out, key.first);
    out << ',' << key.second << ',' << g.count << ',';
    append_double(out, g.price / g.count);
    out << ',';
    append_double(out, 100.0 * g.bandwidth / g.count);
    out << ',';
    append_double(out, g.utility / g.count);
    out << ',';
    append_double(out, g.utility_min);
    out << ',';
    append_double(out, g.utility_max);
    out << ',';
    append_double(out, g.vmu / g.count);
    out << '\n';
  }
}

void print_equilibrium(const EquilibriumSolution& solution,
                       std::ostream& out) {
  out << "price:            " << solution.price << '\n'
      << "constraint:       " << to_string(solution.constraint_binding)
      << (solution.bandwidth_infeasible ? " (WARNING: bandwidth cap "
                                          "infeasible even at max price)"
                                        : "")
      << '\n'
      << "total bandwidth:  " << solution.total_demand() << " (scaled "
      << 100.0 * solution.total_demand() << ")\n"
      << "msp utility:      " << solution.msp_utility << '\n';
  for (size_t n = 0; n < solution.demands.size(); ++n) {
    out << "vmu " << n << ":            demand " << solution.demands[n]
        << " (scaled " << 100.0 * solution.demands[n] << "), utility "
        << solution.vmu_utilities[n] << '\n';
  }
}

std::string equilibrium_to_json(const EquilibriumSolution& solution) {
  nlohmann::json j;
  j["price"] = solution.price;
  j["demands"] = solution.demands;
  j["total_bandwidth"] = solution.total_demand();
  j["total_bandwidth_scaled"] = 100.0 * solution.total_demand();
  j["msp_utility"] = solution.msp_utility;
  j["vmu_utilities"] = solution.vmu_utilities;
  j["constraint_binding"] = to_string(solution.constraint_binding);
  j["bandwidth_infeasible"] = solution.bandwidth_infeasible;
  return j.dump(2) + "\n";
}

TrainingArtifacts run_training(const ScenarioConfig& config,
                               const std::filesystem::path& output_dir) {
  config.validate();
  std::filesystem::create_directories(output_dir);
  TrainingArtifacts artifacts;
  artifacts.curve_path = output_dir / "learning_curve.csv";
  artifacts.trajectory_path = output_dir / "trajectory.csv";

  std::ofstream trajectory(artifacts.trajectory_path);
  if (!trajectory) {
    throw std::runtime_error("cannot write " +
                             artifacts.trajectory_path.string());
  }
  write_trajectory_header(trajectory, static_cast<int>(config.vmus.size()));

  if (config.scheme == Scheme::kDrl) {
    TrainResult trained = train(config.vmus, config.channel, config.msp,
                                config.ppo, config.seed);
    artifacts.curve = trained.curve;

    artifacts.checkpoint_path = output_dir / "policy.ckpt";
    std::ofstream checkpoint(artifacts.checkpoint_path);
    if (!checkpoint) {
      throw std::runtime_error("cannot write " +
                               artifacts.checkpoint_path.string());
    }
    trained.policy.save(checkpoint, config.ppo);

    MigrationEnv env = make_env(config);
    artifacts.final_eval = run_episode(
        env, mix_seed(config.seed, 2),
        [&trained](const MigrationEnv& e) {
          return trained.policy.mean_action(e.observation_features());
        },
        &trajectory, config.ppo.episodes);
  } else {
    MigrationEnv env = make_env(config);
    Rng policy_rng(mix_seed(config.seed, 1));
    Rng reset_seeds(mix_seed(config.seed, 0));
    std::function<double(const MigrationEnv&)> policy;
    if (config.scheme == Scheme::kRandom) {
      policy = [&policy_rng](const MigrationEnv& e) {
        return random_price(policy_rng, e.config());
      };
    } else if (config.scheme == Scheme::kGreedy) {
      // Greedy's history persists within an episode only; rebuilt per episode.
      policy = nullptr;
    } else {
      const double price =
          solve(config.vmus, config.channel, config.msp).price;
      policy = [price](const MigrationEnv&) { return price; };
    }
    artifacts.curve.reserve(config.ppo.episodes);
    for (int episode = 0; episode < config.ppo.episodes; ++episode) {
      std::function<double(const MigrationEnv&)> episode_policy =
          config.scheme == Scheme::kGreedy
              ? make_greedy_policy(config, policy_rng)
              : policy;
      const bool last = episode + 1 == config.ppo.episodes;
      const EpisodeSummary summary =
          run_episode(env, reset_seeds.next_u64(), episode_policy,
                      last ? &trajectory : nullptr, episode);
      artifacts.curve.push_back(LearningCurvePoint{
          episode, summary.episode_return, summary.mean_msp_utility,
          summary.final_price});
      if (last) {
        artifacts.final_eval = summary;
      }
    }
  }

  std::ofstream curve_out(artifacts.curve_path);
  if (!curve_out) {
    throw std::runtime_error("cannot write " + artifacts.curve_path.string());
  }
  write_learning_curve_header(curve_out);
  for (const LearningCurvePoint& point : artifacts.curve) {
    write_learning_curve_row(curve_out, point);
  }
  return artifacts;
}

}  // namespace vtmarket
