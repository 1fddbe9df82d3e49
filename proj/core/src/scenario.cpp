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

#include "vtmarket/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ppo_json.hpp"

namespace vtmarket {

using nlohmann::json;

Scheme parse_scheme(const std::string& name) {
  if (name == "drl") return Scheme::kDrl;
  if (name == "greedy") return Scheme::kGreedy;
  if (name == "random") return Scheme::kRandom;
  if (name == "analytic") return Scheme::kAnalytic;
  throw ConfigError("unknown scheme '" + name +
                    "' (expected drl, greedy, random or analytic)");
}

const char* to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kDrl:
      return "drl";
    case Scheme::kGreedy:
      return "greedy";
    case Scheme::kRandom:
      return "random";
    case Scheme::kAnalytic:
      return "analytic";
  }
  return "unknown";
}

void ScenarioConfig::validate() const {
  try {
    msp.validate();
    ppo.validate();
  } catch (const std::invalid_argument& error) {
    throw ConfigError(error.what());
  }
  if (vmus.empty()) {
    throw ConfigError("vmus: at least one follower profile is required");
  }
  if (static_cast<int>(vmus.size()) > max_vmus) {
    throw ConfigError("vmus: " + std::to_string(vmus.size()) +
                      " followers exceed max_vmus=" +
                      std::to_string(max_vmus));
  }
  for (size_t n = 0; n < vmus.size(); ++n) {
    try {
      vmus[n].validate();
    } catch (const std::invalid_argument& error) {
      throw ConfigError("vmus[" + std::to_string(n) + "]: " + error.what());
    }
  }
  if (greedy_explore_eps < 0.0 || greedy_explore_eps > 1.0) {
    throw ConfigError("greedy_explore_eps must be in [0, 1]");
  }
}

ScenarioConfig two_vmu_scenario() {
  ScenarioConfig config;
  config.vmus = {VmuProfile{5.0, 2.0}, VmuProfile{5.0, 1.0}};
  return config;
}

namespace {

// Field-qualified fetch so parse errors name the offending entry.
const json& member(const json& node, const std::string& key,
                   const std::string& path) {
  if (!node.is_object()) {
    throw ConfigError(path.empty() ? std::string("config root must be an object")
                                   : path + " must be an object");
  }
  auto it = node.find(key);
  if (it == node.end()) {
    throw ConfigError("missing field '" +
                      (path.empty() ? key : path + "." + key) + "'");
  }
  return *it;
}

double number(const json& node, const std::string& key,
              const std::string& path) {
  const json& value = member(node, key, path);
  if (!value.is_number()) {
    throw ConfigError("field '" + (path.empty() ? key : path + "." + key) +
                      "' must be a number");
  }
  return value.get<double>();
}

}  // namespace

std::string serialize_scenario(const ScenarioConfig& config) {
  json j;
  j["channel"] = {{"transmit_power_dbm", config.channel.transmit_power_dbm()},
                  {"unit_gain_db", config.channel.unit_gain_db()},
                  {"distance_m", config.channel.distance_m()},
                  {"path_loss_exp", config.channel.path_loss_exp()},
                  {"noise_power_dbm", config.channel.noise_power_dbm()}};
  j["msp"] = {{"cost", config.msp.cost},
              {"max_bandwidth", config.msp.max_bandwidth},
              {"max_price", config.msp.max_price}};
  j["vmus"] = json::array();
  for (const VmuProfile& profile : config.vmus) {
    j["vmus"].push_back(
        {{"alpha", profile.alpha}, {"data_size", profile.data_size}});
  }
  j["ppo"] = ppo_to_json(config.ppo);
  j["seed"] = config.seed;
  j["scheme"] = to_string(config.scheme);
  j["greedy_explore_eps"] = config.greedy_explore_eps;
  j["max_vmus"] = config.max_vmus;
  return j.dump(2) + "\n";
}

ScenarioConfig parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& error) {
    throw ConfigError(std::string("config is not valid JSON: ") +
                      error.what());
  }
  ScenarioConfig config;
  try {
    const json& ch = member(j, "channel", "");
    // Sequential reads keep the first-missing-field diagnostic stable.
    const double power = number(ch, "transmit_power_dbm", "channel");
    const double gain = number(ch, "unit_gain_db", "channel");
    const double distance = number(ch, "distance_m", "channel");
    const double exponent = number(ch, "path_loss_exp", "channel");
    const double noise = number(ch, "noise_power_dbm", "channel");
    config.channel = ChannelParams(power, gain, distance, exponent, noise);

    const json& msp = member(j, "msp", "");
    config.msp.cost = number(msp, "cost", "msp");
    config.msp.max_bandwidth = number(msp, "max_bandwidth", "msp");
    config.msp.max_price = number(msp, "max_price", "msp");

    const json& vmus = member(j, "vmus", "");
    if (!vmus.is_array()) {
      throw ConfigError("field 'vmus' must be an array");
    }
    config.vmus.clear();
    for (size_t n = 0; n < vmus.size(); ++n) {
      const std::string path = "vmus[" + std::to_string(n) + "]";
      config.vmus.push_back(VmuProfile{number(vmus[n], "alpha", path),
                                       number(vmus[n], "data_size", path)});
    }

    if (j.contains("ppo")) {
      config.ppo = ppo_from_json(j["ppo"]);
    }
    config.seed = j.value("seed", config.seed);
    if (j.contains("scheme")) {
      config.scheme = parse_scheme(j["scheme"].get<std::string>());
    }
    config.greedy_explore_eps =
        j.value("greedy_explore_eps", config.greedy_explore_eps);
    config.max_vmus = j.value("max_vmus", config.max_vmus);
    config.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& error) {
    throw ConfigError(std::string("invalid config: ") + error.what());
  }
  return config;
}

void save_scenario(const ScenarioConfig& config,
                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot open '" + path.string() + "' for writing");
  }
  out << serialize_scenario(config);
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path.string() + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_scenario(text.str());
  } catch (const ConfigError& error) {
    throw ConfigError(path.string() + ": " + error.what());
  }
}

}  // namespace vtmarket
