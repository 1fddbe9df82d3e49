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

#ifndef VTMARKET_PPO_HPP_
#define VTMARKET_PPO_HPP_

// Clipped-surrogate policy optimization for the pricing agent, implemented
// from scratch on top of the two-head network in nn.hpp.
//
// The policy is a Gaussian in an unconstrained space squashed onto
// [cost, max_price] by a sigmoid; the log-density carries the
// change-of-variables correction. The standard deviation is a single
// state-independent learnable parameter (the last entry of the parameter
// vector). Policy mean and value share the trunk.
//
// Each update maximizes
//   mean_k[ min(r_k * A_k, clip(r_k, 1-eps, 1+eps) * A_k)
//           - c * (V(o_k) - V_k^targ)^2 ]
// over a random mini-batch, where r_k is the probability ratio against the
// sampling-time parameters and A_k comes from generalized advantage
// estimation (lambda = 1 reduces to discounted-return-minus-baseline).

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "vtmarket/channel.hpp"
#include "vtmarket/game.hpp"
#include "vtmarket/nn.hpp"
#include "vtmarket/rng.hpp"

namespace vtmarket {

struct PpoHyperparams {
  int episodes = 500;
  int rounds_per_episode = 100;  // K
  int window = 4;                // L
  int batch_size = 20;           // |I|, mini-batch size and update cadence
  int epochs_per_update = 10;    // M
  double learning_rate = 1e-5;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_epsilon = 0.2;
  double value_coef = 0.5;
  double entropy_coef = 0.0;  // off: the objective has no entropy term
  bool normalize_advantages = true;
  bool enable_updates = true;  // off: pure rollout, no gradient steps
  double init_log_std = -0.5;
  double max_ratio = 1e3;  // mini-batches with larger ratios are skipped
  std::array<int, 2> hidden_sizes{64, 64};

  void validate() const;

  bool operator==(const PpoHyperparams&) const = default;
};

// One stored interaction. `presquash` is the Gaussian sample before the
// sigmoid squash; keeping it makes the sampling-time log-probability
// reproducible bit for bit when the parameters have not changed.
struct Transition {
  std::vector<double> observation;
  double action_price = 0.0;
  double presquash = 0.0;
  double reward = 0.0;
  std::vector<double> next_observation;
  double log_prob = 0.0;
  double value = 0.0;
};

struct ActResult {
  double price = 0.0;
  double presquash = 0.0;
  double log_prob = 0.0;
  double value = 0.0;
};

class PolicyNetwork {
 public:
  PolicyNetwork(int input_dim, std::array<int, 2> hidden_sizes,
                double action_low, double action_high, double init_log_std,
                uint64_t init_seed);

  // Samples a price from the squashed Gaussian. Deterministic given the
  // rng state; the returned price lies in [action_low, action_high].
  ActResult act(std::span<const double> observation, Rng& rng) const;

  // Price at the distribution's center (z = mean), for evaluation.
  double mean_action(std::span<const double> observation) const;

  double value(std::span<const double> observation) const;

  struct Heads {
    double mean = 0.0;   // pre-squash action mean
    double value = 0.0;
  };
  Heads forward(std::span<const double> observation) const;

  // Log-density of the action identified by `presquash` under the current
  // parameters (Gaussian log-pdf minus the squash Jacobian).
  double log_prob(std::span<const double> observation, double presquash) const;

  double price_from_presquash(double z) const;
  double presquash_from_price(double price) const;

  double log_std() const { return params_.back(); }
  double action_low() const { return action_low_; }
  double action_high() const { return action_high_; }
  int input_dim() const { return mlp_.shape().input; }
  std::array<int, 2> hidden_sizes() const {
    return {mlp_.shape().hidden1, mlp_.shape().hidden2};
  }

  int param_count() const { return static_cast<int>(params_.size()); }
  std::span<const double> params() const { return params_; }
  std::span<double> mutable_params() { return params_; }
  const TwoHeadMlp& mlp() const { return mlp_; }
  // Parameters excluding the trailing log_std entry.
  std::span<const double> mlp_params() const {
    return std::span<const double>(params_).first(params_.size() - 1);
  }

  // Checkpoint: version header, JSON block with dimensions and
  // hyperparameters, then one hex float per parameter (exact round trip).
  void save(std::ostream& out, const PpoHyperparams& hp) const;
  static std::pair<PolicyNetwork, PpoHyperparams> load(std::istream& in);

 private:
  TwoHeadMlp mlp_;
  double action_low_;
  double action_high_;
  std::vector<double> params_;  // [mlp parameters..., log_std]
};

// Generalized advantage estimation over one trajectory segment.
// `terminal_value` bootstraps the value beyond the last reward. Returns
// (advantages, value targets). With lambda = 1 the advantage equals the
// discounted reward sum plus discounted terminal value minus the baseline.
// Throws std::domain_error on length mismatch.
std::pair<std::vector<double>, std::vector<double>> gae_advantages(
    std::span<const double> rewards, std::span<const double> values,
    double terminal_value, double gamma, double lambda);

// Clip function of the surrogate: the identity inside [1-eps, 1+eps],
// saturated outside.
double clip_ratio(double ratio, double epsilon);

struct LossDiagnostics {
  double total = 0.0;       // minimized loss: -surrogate + c*vf - ent*H
  double surrogate = 0.0;   // mean clipped surrogate
  double value_loss = 0.0;  // mean squared value error
  double entropy = 0.0;     // Gaussian base entropy (squash term omitted)
  double mean_ratio = 0.0;
  double max_ratio = 0.0;
};

// Loss over the mini-batch selected by `indices`, with advantages/returns
// indexed the same way as `buffer`. Fills parameter gradients of the loss
// into `grad` (accumulated; caller zeroes) unless `grad` is empty.
// Advantage normalization, when enabled, happens inside over the selected
// mini-batch and is treated as constant for differentiation.
LossDiagnostics ppo_loss(const PolicyNetwork& net,
                         std::span<const Transition> buffer,
                         std::span<const int> indices,
                         std::span<const double> advantages,
                         std::span<const double> returns,
                         const PpoHyperparams& hp, std::span<double> grad);

struct UpdateDiagnostics {
  int gradient_steps = 0;
  int skipped_batches = 0;
  double last_loss = 0.0;
};

// One update trigger: computes GAE over the whole buffer (bootstrapped
// with the current value of the last next-observation), then performs
// `epochs_per_update` gradient steps, each on a fresh random mini-batch of
// `batch_size` transitions (capped at the buffer size). Mini-batches whose
// largest ratio exceeds `max_ratio` are skipped. Throws std::runtime_error
// on a non-finite loss.
UpdateDiagnostics ppo_update(PolicyNetwork& net,
                             std::span<const Transition> buffer,
                             const PpoHyperparams& hp, AdamOptimizer& opt,
                             Rng& rng);

struct LearningCurvePoint {
  int episode = 0;
  double episode_return = 0.0;
  double mean_msp_utility = 0.0;
  double final_price = 0.0;
};

struct TrainResult {
  std::vector<LearningCurvePoint> curve;
  PolicyNetwork policy;
  long transitions_stored = 0;
  long gradient_steps = 0;
  long skipped_batches = 0;
  int clamped_actions = 0;
};

// Full training loop: `episodes` episodes of `rounds_per_episode` rounds
// against the follower best responses, updating every `batch_size` stored
// transitions. The replay buffer is cleared at every episode reset.
// Reproducible given the seed. Throws std::runtime_error (with episode and
// round indices) on non-finite network outputs or losses.
TrainResult train(const std::vector<VmuProfile>& profiles,
                  const ChannelParams& channel, const MspConfig& config,
                  const PpoHyperparams& hp, uint64_t seed);

// Learning-curve CSV: episode,return,mean_msp_utility,final_price
void write_learning_curve_header(std::ostream& out);
void write_learning_curve_row(std::ostream& out,
                              const LearningCurvePoint& point);

}  // namespace vtmarket

#endif  // VTMARKET_PPO_HPP_
