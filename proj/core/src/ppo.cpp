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

#include "vtmarket/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <cstdlib>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ppo_json.hpp"
#include "vtmarket/env.hpp"

namespace vtmarket {

namespace {

constexpr double kHalfLog2Pi = 0.9189385332046727;  // 0.5 * ln(2*pi)

double softplus(double x) {
  return x > 30.0 ? x : std::log1p(std::exp(x));
}

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log-density of price = low + (high-low)*sigmoid(z) where z ~ N(mean, sd).
// The squash correction softplus(z) + softplus(-z) - log(high-low) does not
// depend on the parameters, so gradients flow only through mean and
// log_std.
double squashed_log_prob(double z, double mean, double log_std, double low,
                         double high) {
  const double sd = std::exp(log_std);
  const double t = (z - mean) / sd;
  const double gauss = -0.5 * t * t - log_std - kHalfLog2Pi;
  return gauss - std::log(high - low) + softplus(z) + softplus(-z);
}

}  // namespace

void PpoHyperparams::validate() const {
  if (episodes <= 0 || rounds_per_episode <= 0 || window <= 0) {
    throw std::invalid_argument(
        "PpoHyperparams: episodes, rounds_per_episode and window must be > 0");
  }
  if (batch_size <= 0 || batch_size > rounds_per_episode) {
    // The buffer holds at most one episode, so larger batches can never fill.
    throw std::invalid_argument(
        "PpoHyperparams: need 0 < batch_size <= rounds_per_episode");
  }
  if (epochs_per_update <= 0) {
    throw std::invalid_argument("PpoHyperparams: epochs_per_update must be > 0");
  }
  if (!(learning_rate > 0.0)) {
    throw std::invalid_argument("PpoHyperparams: learning_rate must be > 0");
  }
  if (gamma < 0.0 || gamma > 1.0) {
    throw std::invalid_argument("PpoHyperparams: gamma must be in [0, 1]");
  }
  if (gae_lambda < 0.0 || gae_lambda > 1.0) {
    throw std::invalid_argument("PpoHyperparams: gae_lambda must be in [0, 1]");
  }
  if (!(clip_epsilon > 0.0)) {
    throw std::invalid_argument("PpoHyperparams: clip_epsilon must be > 0");
  }
  if (!(value_coef > 0.0)) {
    throw std::invalid_argument("PpoHyperparams: value_coef must be > 0");
  }
  if (!(max_ratio > 1.0)) {
    throw std::invalid_argument("PpoHyperparams: max_ratio must be > 1");
  }
  if (hidden_sizes[0] <= 0 || hidden_sizes[1] <= 0) {
    throw std::invalid_argument("PpoHyperparams: hidden sizes must be > 0");
  }
}

PolicyNetwork::PolicyNetwork(int input_dim, std::array<int, 2> hidden_sizes,
                             double action_low, double action_high,
                             double init_log_std, uint64_t init_seed)
    : mlp_(MlpShape{input_dim, hidden_sizes[0], hidden_sizes[1]}),
      action_low_(action_low),
      action_high_(action_high) {
  if (!(action_high > action_low)) {
    throw std::invalid_argument(
        "PolicyNetwork: need action_low < action_high");
  }
  params_.resize(mlp_.param_count() + 1);
  Rng rng(init_seed);
  mlp_.init_params(std::span<double>(params_).first(mlp_.param_count()), rng);
  params_.back() = init_log_std;
}

PolicyNetwork::Heads PolicyNetwork::forward(
    std::span<const double> observation) const {
  const TwoHeadMlp::Output out = mlp_.forward(mlp_params(), observation);
  return Heads{out.head0, out.head1};
}

double PolicyNetwork::price_from_presquash(double z) const {
  return action_low_ + (action_high_ - action_low_) * sigmoid(z);
}

double PolicyNetwork::presquash_from_price(double price) const {
  const double u = (price - action_low_) / (action_high_ - action_low_);
  return std::log(u) - std::log1p(-u);
}

ActResult PolicyNetwork::act(std::span<const double> observation,
                             Rng& rng) const {
  const Heads heads = forward(observation);
  const double z = heads.mean + std::exp(log_std()) * rng.normal();
  ActResult result;
  result.presquash = z;
  result.price = price_from_presquash(z);
  result.log_prob =
      squashed_log_prob(z, heads.mean, log_std(), action_low_, action_high_);
  result.value = heads.value;
  return result;
}

double PolicyNetwork::mean_action(std::span<const double> observation) const {
  return price_from_presquash(forward(observation).mean);
}

double PolicyNetwork::value(std::span<const double> observation) const {
  return forward(observation).value;
}

double PolicyNetwork::log_prob(std::span<const double> observation,
                               double presquash) const {
  const Heads heads = forward(observation);
  return squashed_log_prob(presquash, heads.mean, log_std(), action_low_,
                           action_high_);
}

std::pair<std::vector<double>, std::vector<double>> gae_advantages(
    std::span<const double> rewards, std::span<const double> values,
    double terminal_value, double gamma, double lambda) {
  if (rewards.size() != values.size()) {
    throw std::domain_error("gae_advantages: rewards/values length mismatch");
  }
  const int horizon = static_cast<int>(rewards.size());
  std::vector<double> advantages(horizon, 0.0);
  std::vector<double> targets(horizon, 0.0);
  double gae = 0.0;
  for (int t = horizon - 1; t >= 0; --t) {
    const double next_value = t + 1 < horizon ? values[t + 1] : terminal_value;
    const double delta = rewards[t] + gamma * next_value - values[t];
    gae = delta + gamma * lambda * gae;
    advantages[t] = gae;
    targets[t] = advantages[t] + values[t];
  }
  return {std::move(advantages), std::move(targets)};
}

double clip_ratio(double ratio, double epsilon) {
  if (ratio < 1.0 - epsilon) return 1.0 - epsilon;
  if (ratio > 1.0 + epsilon) return 1.0 + epsilon;
  return ratio;
}

LossDiagnostics ppo_loss(const PolicyNetwork& net,
                         std::span<const Transition> buffer,
                         std::span<const int> indices,
                         std::span<const double> advantages,
                         std::span<const double> returns,
                         const PpoHyperparams& hp, std::span<double> grad) {
  if (indices.empty()) {
    throw std::invalid_argument("ppo_loss: empty mini-batch");
  }
  const bool with_grad = !grad.empty();
  if (with_grad && static_cast<int>(grad.size()) != net.param_count()) {
    throw std::invalid_argument("ppo_loss: gradient size mismatch");
  }
  const int m = static_cast<int>(indices.size());
  const double inv_m = 1.0 / m;

  std::vector<double> batch_adv(m);
  for (int i = 0; i < m; ++i) {
    batch_adv[i] = advantages[indices[i]];
  }
  if (hp.normalize_advantages && m > 1) {
    const double mean =
        std::accumulate(batch_adv.begin(), batch_adv.end(), 0.0) * inv_m;
    double variance = 0.0;
    for (double a : batch_adv) {
      variance += (a - mean) * (a - mean);
    }
    const double sd = std::sqrt(variance / (m - 1));
    for (double& a : batch_adv) {
      a = (a - mean) / (sd + 1e-8);
    }
  }

  const double log_std = net.log_std();
  const double sd = std::exp(log_std);
  const double inv_var = 1.0 / (sd * sd);
  const double entropy = 0.5 + kHalfLog2Pi + log_std;  // Gaussian base term

  LossDiagnostics diag;
  diag.entropy = entropy;
  TwoHeadMlp::Workspace workspace;
  double grad_log_std = 0.0;

  for (int i = 0; i < m; ++i) {
    const Transition& tr = buffer[indices[i]];
    const TwoHeadMlp::Output out =
        net.mlp().forward(net.mlp_params(), tr.observation,
                          with_grad ? &workspace : nullptr);
    const double z = tr.presquash;
    const double lp_new = squashed_log_prob(z, out.head0, log_std,
                                            net.action_low(),
                                            net.action_high());
    const double ratio = std::exp(lp_new - tr.log_prob);
    diag.mean_ratio += ratio * inv_m;
    diag.max_ratio = std::max(diag.max_ratio, ratio);

    const double adv = batch_adv[i];
    const double unclipped = ratio * adv;
    const double clipped = clip_ratio(ratio, hp.clip_epsilon) * adv;
    const double surrogate = std::min(unclipped, clipped);
    const double vdiff = out.head1 - returns[indices[i]];

    diag.surrogate += surrogate * inv_m;
    diag.value_loss += vdiff * vdiff * inv_m;

    if (with_grad) {
      // d(surrogate)/d(log pi): the unclipped branch contributes
      // ratio * adv; the clipped branch only passes gradient inside the
      // band (where it coincides with the unclipped one).
      double dsurr_dlp = 0.0;
      if (unclipped <= clipped) {
        dsurr_dlp = unclipped;
      } else if (ratio > 1.0 - hp.clip_epsilon &&
                 ratio < 1.0 + hp.clip_epsilon) {
        dsurr_dlp = unclipped;
      }
      const double dloss_dlp = -dsurr_dlp * inv_m;
      const double diff = z - out.head0;
      const double grad_mean = dloss_dlp * diff * inv_var;
      grad_log_std += dloss_dlp * (diff * diff * inv_var - 1.0);
      const double grad_value = 2.0 * hp.value_coef * vdiff * inv_m;
      net.mlp().backward(net.mlp_params(), workspace, grad_mean, grad_value,
                         grad.first(grad.size() - 1));
    }
  }
  grad_log_std -= hp.entropy_coef;  // d(-coef * entropy)/d(log_std)
  if (with_grad) {
    grad.back() += grad_log_std;
  }
  diag.total = -diag.surrogate + hp.value_coef * diag.value_loss -
               hp.entropy_coef * entropy;
  return diag;
}

UpdateDiagnostics ppo_update(PolicyNetwork& net,
                             std::span<const Transition> buffer,
                             const PpoHyperparams& hp, AdamOptimizer& opt,
                             Rng& rng) {
  UpdateDiagnostics diag;
  if (buffer.empty()) {
    return diag;
  }
  const int n = static_cast<int>(buffer.size());
  std::vector<double> rewards(n);
  std::vector<double> values(n);
  for (int i = 0; i < n; ++i) {
    rewards[i] = buffer[i].reward;
    values[i] = buffer[i].value;
  }
  const double terminal_value = net.value(buffer.back().next_observation);
  auto [advantages, returns] = gae_advantages(rewards, values, terminal_value,
                                              hp.gamma, hp.gae_lambda);

  std::vector<double> grad(net.param_count());
  const int batch = std::min(hp.batch_size, n);
  for (int epoch = 0; epoch < hp.epochs_per_update; ++epoch) {
    const std::vector<int> indices = sample_without_replacement(n, batch, rng);
    std::fill(grad.begin(), grad.end(), 0.0);
    const LossDiagnostics loss =
        ppo_loss(net, buffer, indices, advantages, returns, hp, grad);
    if (!std::isfinite(loss.total)) {
      throw std::runtime_error("ppo_update: non-finite loss");
    }
    if (loss.max_ratio > hp.max_ratio) {
      ++diag.skipped_batches;
      continue;
    }
    opt.step(net.mutable_params(), grad);
    ++diag.gradient_steps;
    diag.last_loss = loss.total;
  }
  return diag;
}

TrainResult train(const std::vector<VmuProfile>& profiles,
                  const ChannelParams& channel, const MspConfig& config,
                  const PpoHyperparams& hp, uint64_t seed) {
  hp.validate();
  MigrationEnv env(profiles, channel, config, hp.window,
                   hp.rounds_per_episode);

  // Independent streams so that, e.g., the number of update epochs cannot
  // perturb the action noise sequence.
  Rng seeder(seed);
  const uint64_t net_seed = seeder.next_u64();
  Rng episode_seeds(seeder.next_u64());
  Rng action_rng(seeder.next_u64());
  Rng update_rng(seeder.next_u64());

  PolicyNetwork net(env.feature_dim(), hp.hidden_sizes, config.cost,
                    config.max_price, hp.init_log_std, net_seed);
  AdamOptimizer opt(net.param_count(), hp.learning_rate);

  std::vector<LearningCurvePoint> curve;
  curve.reserve(hp.episodes);
  std::vector<Transition> buffer;
  buffer.reserve(hp.rounds_per_episode);
  long transitions = 0;
  long gradient_steps = 0;
  long skipped = 0;

  for (int episode = 0; episode < hp.episodes; ++episode) {
    env.reset(episode_seeds.next_u64());
    buffer.clear();
    std::vector<double> observation = env.observation_features();
    double episode_return = 0.0;
    double utility_sum = 0.0;
    double final_price = 0.0;

    for (int round = 0; round < hp.rounds_per_episode; ++round) {
      const ActResult action = net.act(observation, action_rng);
      if (!std::isfinite(action.price) || !std::isfinite(action.value) ||
          !std::isfinite(action.log_prob)) {
        throw std::runtime_error(
            "train: non-finite policy output at episode " +
            std::to_string(episode) + " round " + std::to_string(round));
      }
      const MigrationEnv::StepResult step = env.step(action.price);
      std::vector<double> next_observation = env.observation_features();

      buffer.push_back(Transition{observation, step.price, action.presquash,
                                  static_cast<double>(step.reward),
                                  next_observation, action.log_prob,
                                  action.value});
      ++transitions;
      episode_return += step.reward;
      utility_sum += step.msp_utility;
      final_price = step.price;
      observation = std::move(next_observation);

      if (hp.enable_updates &&
          static_cast<int>(buffer.size()) % hp.batch_size == 0) {
        try {
          const UpdateDiagnostics update =
              ppo_update(net, buffer, hp, opt, update_rng);
          gradient_steps += update.gradient_steps;
          skipped += update.skipped_batches;
          if (update.skipped_batches > 0) {
            std::cerr << "warning: skipped " << update.skipped_batches
                      << " mini-batch(es) with ratios above " << hp.max_ratio
                      << " at episode " << episode << " round " << round
                      << "\n";
          }
        } catch (const std::runtime_error& error) {
          throw std::runtime_error(std::string(error.what()) +
                                   " at episode " + std::to_string(episode) +
                                   " round " + std::to_string(round));
        }
      }
    }
    curve.push_back(LearningCurvePoint{
        episode, episode_return, utility_sum / hp.rounds_per_episode,
        final_price});
  }

  return TrainResult{std::move(curve), std::move(net), transitions,
                     gradient_steps, skipped, env.clamped_actions()};
}

namespace {

constexpr char kCheckpointMagic[] = "vtmarket-policy v1";

void append_double(std::ostream& out, double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.10g", value);
  out << buffer;
}

}  // namespace

void PolicyNetwork::save(std::ostream& out, const PpoHyperparams& hp) const {
  nlohmann::json meta;
  meta["input_dim"] = input_dim();
  meta["hidden_sizes"] = hidden_sizes();
  meta["action_low"] = action_low_;
  meta["action_high"] = action_high_;
  meta["hyperparams"] = ppo_to_json(hp);
  out << kCheckpointMagic << '\n' << meta.dump() << '\n' << params_.size()
      << '\n';
  char buffer[48];
  for (double p : params_) {
    std::snprintf(buffer, sizeof(buffer), "%a", p);
    out << buffer << '\n';
  }
}

std::pair<PolicyNetwork, PpoHyperparams> PolicyNetwork::load(
    std::istream& in) {
  std::string magic;
  std::getline(in, magic);
  if (magic != kCheckpointMagic) {
    throw std::runtime_error("PolicyNetwork::load: bad header '" + magic +
                             "'");
  }
  std::string meta_line;
  std::getline(in, meta_line);
  const nlohmann::json meta = nlohmann::json::parse(meta_line);
  const int input_dim = meta.at("input_dim").get<int>();
  const auto hidden = meta.at("hidden_sizes").get<std::array<int, 2>>();
  const double low = meta.at("action_low").get<double>();
  const double high = meta.at("action_high").get<double>();
  const PpoHyperparams hp = ppo_from_json(meta.at("hyperparams"));

  PolicyNetwork net(input_dim, hidden, low, high, hp.init_log_std,
                    /*init_seed=*/0);
  size_t count = 0;
  in >> count;
  if (count != net.params_.size()) {
    throw std::runtime_error("PolicyNetwork::load: parameter count " +
                             std::to_string(count) + " does not match shape");
  }
  std::string token;
  for (size_t i = 0; i < count; ++i) {
    in >> token;
    net.params_[i] = std::strtod(token.c_str(), nullptr);
  }
  if (!in) {
    throw std::runtime_error("PolicyNetwork::load: truncated checkpoint");
  }
  return {std::move(net), hp};
}

void write_learning_curve_header(std::ostream& out) {
  out << "episode,return,mean_msp_utility,final_price\n";
}

void write_learning_curve_row(std::ostream& out,
                              const LearningCurvePoint& point) {
  out << point.episode << ',';
  append_double(out, point.episode_return);
  out << ',';
  append_double(out, point.mean_msp_utility);
  out << ',';
  append_double(out, point.final_price);
  out << '\n';
}

nlohmann::json ppo_to_json(const PpoHyperparams& hp) {
  return nlohmann::json{{"episodes", hp.episodes},
                        {"rounds_per_episode", hp.rounds_per_episode},
                        {"window", hp.window},
                        {"batch_size", hp.batch_size},
                        {"epochs_per_update", hp.epochs_per_update},
                        {"learning_rate", hp.learning_rate},
                        {"gamma", hp.gamma},
                        {"gae_lambda", hp.gae_lambda},
                        {"clip_epsilon", hp.clip_epsilon},
                        {"value_coef", hp.value_coef},
                        {"entropy_coef", hp.entropy_coef},
                        {"normalize_advantages", hp.normalize_advantages},
                        {"enable_updates", hp.enable_updates},
                        {"init_log_std", hp.init_log_std},
                        {"max_ratio", hp.max_ratio},
                        {"hidden_sizes", hp.hidden_sizes}};
}

PpoHyperparams ppo_from_json(const nlohmann::json& j) {
  PpoHyperparams hp;
  hp.episodes = j.value("episodes", hp.episodes);
  hp.rounds_per_episode = j.value("rounds_per_episode", hp.rounds_per_episode);
  hp.window = j.value("window", hp.window);
  hp.batch_size = j.value("batch_size", hp.batch_size);
  hp.epochs_per_update = j.value("epochs_per_update", hp.epochs_per_update);
  hp.learning_rate = j.value("learning_rate", hp.learning_rate);
  hp.gamma = j.value("gamma", hp.gamma);
  hp.gae_lambda = j.value("gae_lambda", hp.gae_lambda);
  hp.clip_epsilon = j.value("clip_epsilon", hp.clip_epsilon);
  hp.value_coef = j.value("value_coef", hp.value_coef);
  hp.entropy_coef = j.value("entropy_coef", hp.entropy_coef);
  hp.normalize_advantages =
      j.value("normalize_advantages", hp.normalize_advantages);
  hp.enable_updates = j.value("enable_updates", hp.enable_updates);
  hp.init_log_std = j.value("init_log_std", hp.init_log_std);
  hp.max_ratio = j.value("max_ratio", hp.max_ratio);
  hp.hidden_sizes = j.value("hidden_sizes", hp.hidden_sizes);
  hp.validate();
  return hp;
}

}  // namespace vtmarket
