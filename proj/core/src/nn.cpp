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

#include "vtmarket/nn.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace vtmarket {

TwoHeadMlp::TwoHeadMlp(MlpShape shape) : shape_(shape) {
  if (shape_.input <= 0 || shape_.hidden1 <= 0 || shape_.hidden2 <= 0) {
    throw std::invalid_argument("TwoHeadMlp: all dimensions must be > 0");
  }
  param_count_ = shape_.hidden1 * shape_.input + shape_.hidden1 +
                 shape_.hidden2 * shape_.hidden1 + shape_.hidden2 +
                 2 * (shape_.hidden2 + 1);
}

void TwoHeadMlp::init_params(std::span<double> params, Rng& rng) const {
  assert(static_cast<int>(params.size()) == param_count_);
  auto xavier = [&](int offset, int rows, int cols, double gain) {
    const double bound = gain * std::sqrt(6.0 / (rows + cols));
    for (int i = 0; i < rows * cols; ++i) {
      params[offset + i] = rng.uniform(-bound, bound);
    }
  };
  xavier(w1(), shape_.hidden1, shape_.input, 1.0);
  xavier(w2(), shape_.hidden2, shape_.hidden1, 1.0);
  xavier(wh0(), 1, shape_.hidden2, 0.01);
  xavier(wh1(), 1, shape_.hidden2, 1.0);
  for (int i = 0; i < shape_.hidden1; ++i) params[b1() + i] = 0.0;
  for (int i = 0; i < shape_.hidden2; ++i) params[b2() + i] = 0.0;
  params[bh0()] = 0.0;
  params[bh1()] = 0.0;
}

TwoHeadMlp::Output TwoHeadMlp::forward(std::span<const double> params,
                                       std::span<const double> input,
                                       Workspace* workspace) const {
  assert(static_cast<int>(params.size()) == param_count_);
  if (static_cast<int>(input.size()) != shape_.input) {
    throw std::invalid_argument("TwoHeadMlp::forward: bad input size");
  }
  const int in = shape_.input;
  const int h1 = shape_.hidden1;
  const int h2 = shape_.hidden2;

  thread_local std::vector<double> act1_local;
  thread_local std::vector<double> act2_local;
  std::vector<double>& act1 = workspace ? workspace->act1 : act1_local;
  std::vector<double>& act2 = workspace ? workspace->act2 : act2_local;
  act1.resize(h1);
  act2.resize(h2);

  for (int i = 0; i < h1; ++i) {
    double sum = params[b1() + i];
    const double* row = &params[w1() + i * in];
    for (int j = 0; j < in; ++j) {
      sum += row[j] * input[j];
    }
    act1[i] = std::tanh(sum);
  }
  for (int i = 0; i < h2; ++i) {
    double sum = params[b2() + i];
    const double* row = &params[w2() + i * h1];
    for (int j = 0; j < h1; ++j) {
      sum += row[j] * act1[j];
    }
    act2[i] = std::tanh(sum);
  }
  Output out;
  out.head0 = params[bh0()];
  out.head1 = params[bh1()];
  for (int i = 0; i < h2; ++i) {
    out.head0 += params[wh0() + i] * act2[i];
    out.head1 += params[wh1() + i] * act2[i];
  }
  if (workspace) {
    workspace->input.assign(input.begin(), input.end());
  }
  return out;
}

void TwoHeadMlp::backward(std::span<const double> params,
                          const Workspace& workspace, double grad_head0,
                          double grad_head1, std::span<double> grad) const {
  assert(static_cast<int>(grad.size()) == param_count_);
  const int in = shape_.input;
  const int h1 = shape_.hidden1;
  const int h2 = shape_.hidden2;
  const std::vector<double>& act1 = workspace.act1;
  const std::vector<double>& act2 = workspace.act2;

  thread_local std::vector<double> delta2;
  thread_local std::vector<double> delta1;
  delta2.resize(h2);
  delta1.resize(h1);

  grad[bh0()] += grad_head0;
  grad[bh1()] += grad_head1;
  for (int i = 0; i < h2; ++i) {
    grad[wh0() + i] += grad_head0 * act2[i];
    grad[wh1() + i] += grad_head1 * act2[i];
    const double upstream =
        grad_head0 * params[wh0() + i] + grad_head1 * params[wh1() + i];
    delta2[i] = upstream * (1.0 - act2[i] * act2[i]);
  }
  for (int j = 0; j < h1; ++j) {
    delta1[j] = 0.0;
  }
  for (int i = 0; i < h2; ++i) {
    const double d = delta2[i];
    grad[b2() + i] += d;
    double* wrow = &grad[w2() + i * h1];
    const double* prow = &params[w2() + i * h1];
    for (int j = 0; j < h1; ++j) {
      wrow[j] += d * act1[j];
      delta1[j] += d * prow[j];
    }
  }
  for (int i = 0; i < h1; ++i) {
    const double d = delta1[i] * (1.0 - act1[i] * act1[i]);
    grad[b1() + i] += d;
    double* wrow = &grad[w1() + i * in];
    for (int j = 0; j < in; ++j) {
      wrow[j] += d * workspace.input[j];
    }
  }
}

AdamOptimizer::AdamOptimizer(int param_count, double learning_rate,
                             double beta1, double beta2, double epsilon)
    : learning_rate_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      epsilon_(epsilon),
      first_moment_(param_count, 0.0),
      second_moment_(param_count, 0.0) {}

void AdamOptimizer::step(std::span<double> params,
                         std::span<const double> grad) {
  if (params.size() != first_moment_.size() ||
      grad.size() != first_moment_.size()) {
    throw std::invalid_argument("AdamOptimizer::step: size mismatch");
  }
  ++steps_;
  const double correction1 = 1.0 - std::pow(beta1_, steps_);
  const double correction2 = 1.0 - std::pow(beta2_, steps_);
  for (size_t i = 0; i < params.size(); ++i) {
    first_moment_[i] = beta1_ * first_moment_[i] + (1.0 - beta1_) * grad[i];
    second_moment_[i] =
        beta2_ * second_moment_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    const double m_hat = first_moment_[i] / correction1;
    const double v_hat = second_moment_[i] / correction2;
    params[i] -= learning_rate_ * m_hat / (std::sqrt(v_hat) + epsilon_);
  }
}

}  // namespace vtmarket
