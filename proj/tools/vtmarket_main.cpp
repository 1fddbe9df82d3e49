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

// Command-line front end. Exit codes: 0 success, 1 configuration error,
// 2 runtime/numeric failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vtmarket/runner.hpp"
#include "vtmarket/scenario.hpp"

namespace {

namespace fs = std::filesystem;
using namespace vtmarket;

struct CommonArgs {
  std::string config_path;
  std::string output_dir;
  std::optional<uint64_t> seed;
  std::optional<std::string> scheme;
};

ScenarioConfig load_with_overrides(const CommonArgs& args) {
  ScenarioConfig config = load_scenario(args.config_path);
  if (args.seed) {
    config.seed = *args.seed;
  }
  if (args.scheme) {
    config.scheme = parse_scheme(*args.scheme);
  }
  return config;
}

std::vector<Scheme> parse_scheme_list(const std::string& csv) {
  std::vector<Scheme> schemes;
  std::string token;
  std::istringstream stream(csv);
  while (std::getline(stream, token, ',')) {
    if (!token.empty()) {
      schemes.push_back(parse_scheme(token));
    }
  }
  if (schemes.empty()) {
    throw ConfigError("no schemes given");
  }
  return schemes;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << contents;
}

void report_failures(const std::vector<SweepRow>& rows) {
  for (const SweepRow& row : rows) {
    if (row.failed) {
      std::cerr << "row failed (axis=" << row.axis_value << ", scheme="
                << to_string(row.scheme) << ", seed=" << row.seed
                << "): " << row.error << "\n";
    }
  }
}

void write_rows(const fs::path& dir, const std::string& stem,
                const std::vector<SweepRow>& rows) {
  fs::create_directories(dir);
  std::ostringstream csv;
  write_sweep_csv(csv, rows);
  write_file(dir / (stem + ".csv"), csv.str());
  std::ostringstream summary;
  write_sweep_summary_csv(summary, rows);
  write_file(dir / (stem + "_summary.csv"), summary.str());
  report_failures(rows);
  std::cout << summary.str();
}

int run(int argc, char** argv) {
  CLI::App app{"Stackelberg bandwidth market for vehicular twin migration: "
               "analytic equilibrium, PPO pricing agent, baselines"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string axis = "cost";
  std::string schemes_csv = "analytic,drl,greedy,random";
  std::vector<double> axis_values;
  int stochastic_seeds = 7;
  unsigned jobs = 0;

  auto add_common = [&](CLI::App* cmd, bool with_output) {
    cmd->add_option("-c,--config", args.config_path, "scenario config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    if (with_output) {
      cmd->add_option("-o,--output-dir", args.output_dir,
                      "output directory (created if missing)");
    }
    cmd->add_option("-s,--seed", args.seed, "override the config seed");
  };

  CLI::App* eq = app.add_subcommand(
      "equilibrium", "solve the analytic Stackelberg equilibrium");
  add_common(eq, true);

  CLI::App* train_cmd = app.add_subcommand(
      "train", "run the configured scheme and write learning artifacts");
  add_common(train_cmd, true);
  train_cmd->add_option("--scheme", args.scheme,
                        "override scheme: drl, greedy, random or analytic");

  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "sweep transmission cost or follower count across schemes");
  add_common(sweep_cmd, true);
  sweep_cmd->add_option("--axis", axis, "sweep axis: cost or vmus")
      ->check(CLI::IsMember({"cost", "vmus"}));
  sweep_cmd->add_option("--values", axis_values,
                        "axis values (default: cost 5..9, vmus 1..6)");
  sweep_cmd->add_option("--schemes", schemes_csv, "comma-separated schemes");
  sweep_cmd->add_option("--seeds", stochastic_seeds,
                        "seeds per stochastic scheme");
  sweep_cmd->add_option("--jobs", jobs, "worker threads (0 = hardware)");

  CLI::App* compare_cmd = app.add_subcommand(
      "compare", "evaluate all schemes on one scenario");
  add_common(compare_cmd, true);
  compare_cmd->add_option("--schemes", schemes_csv,
                          "comma-separated schemes");
  compare_cmd->add_option("--seeds", stochastic_seeds,
                          "seeds per stochastic scheme");
  compare_cmd->add_option("--jobs", jobs, "worker threads (0 = hardware)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (app.got_subcommand(eq)) {
    const ScenarioConfig config = load_with_overrides(args);
    const EquilibriumSolution solution =
        solve(config.vmus, config.channel, config.msp);
    print_equilibrium(solution, std::cout);
    if (!args.output_dir.empty()) {
      fs::create_directories(args.output_dir);
      write_file(fs::path(args.output_dir) / "equilibrium.json",
                 equilibrium_to_json(solution));
    }
  } else if (app.got_subcommand(train_cmd)) {
    const ScenarioConfig config = load_with_overrides(args);
    const fs::path out_dir = args.output_dir.empty()
                                 ? fs::path("vtmarket_out")
                                 : fs::path(args.output_dir);
    const TrainingArtifacts artifacts = run_training(config, out_dir);
    std::cout << "scheme:          " << to_string(config.scheme) << "\n"
              << "episodes:        " << artifacts.curve.size() << "\n"
              << "learning curve:  " << artifacts.curve_path.string() << "\n"
              << "trajectory:      " << artifacts.trajectory_path.string()
              << "\n";
    if (!artifacts.checkpoint_path.empty()) {
      std::cout << "checkpoint:      " << artifacts.checkpoint_path.string()
                << "\n"
                << "final eval U_s:  " << artifacts.final_eval.mean_msp_utility
                << " at mean price " << artifacts.final_eval.mean_price
                << "\n";
    }
  } else if (app.got_subcommand(sweep_cmd)) {
    const ScenarioConfig config = load_with_overrides(args);
    SweepOptions options;
    options.axis = parse_axis(axis);
    options.values = axis_values;
    options.schemes = parse_scheme_list(schemes_csv);
    options.stochastic_seeds = stochastic_seeds;
    options.max_workers = jobs;
    const std::vector<SweepRow> rows = run_sweep(config, options);
    const fs::path out_dir = args.output_dir.empty()
                                 ? fs::path("vtmarket_out")
                                 : fs::path(args.output_dir);
    write_rows(out_dir, std::string("sweep_") + to_string(options.axis), rows);
  } else if (app.got_subcommand(compare_cmd)) {
    const ScenarioConfig config = load_with_overrides(args);
    const std::vector<SweepRow> rows = run_compare(
        config, parse_scheme_list(schemes_csv), stochastic_seeds, jobs);
    const fs::path out_dir = args.output_dir.empty()
                                 ? fs::path("vtmarket_out")
                                 : fs::path(args.output_dir);
    write_rows(out_dir, "compare", rows);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const vtmarket::ConfigError& error) {
    std::cerr << "config error: " << error.what() << "\n";
    return 1;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 2;
  }
}
