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

#ifndef VTMARKET_NN_HPP_
#define VTMARKET_NN_HPP_

// Minimal feed-forward approximator: input -> tanh -> tanh -> two scalar
// heads sharing the trunk. The network is small enough that forward and
// reverse passes are written out by hand; gradients are checked against
// finite differences in the tests.

#include <span>
#include <vector>

#include "vtmarket/rng.hpp"

namespace vtmarket {

struct MlpShape {
  int input = 0;
  int hidden1 = 64;
  int hidden2 = 64;
};

// Stateless description of the network; parameters live in a caller-owned
// flat vector laid out as [W1, b1, W2, b2, w_head0, b_head0, w_head1,
// b_head1] with row-major weight matrices.
class TwoHeadMlp {
 public:
  explicit TwoHeadMlp(MlpShape shape);

  int param_count() const { return param_count_; }
  const MlpShape& shape() const { return shape_; }

  // Xavier-uniform trunk, zero biases. head0 weights are scaled down so
  // the first head starts near zero; head1 keeps full scale.
  void init_params(std::span<double> params, Rng& rng) const;

  struct Output {
    double head0 = 0.0;
    double head1 = 0.0;
  };

  // Activations retained for the reverse pass.
  struct Workspace {
    std::vector<double> input;
    std::vector<double> act1;
    std::vector<double> act2;
  };

  Output forward(std::span<const double> params,
                 std::span<const double> input,
                 Workspace* workspace = nullptr) const;

  // Accumulates d(loss)/d(params) into `grad` given head seed gradients
  // and the workspace of the matching forward call.
  void backward(std::span<const double> params, const Workspace& workspace,
                double grad_head0, double grad_head1,
                std::span<double> grad) const;

 private:
  // Offsets into the flat parameter vector.
  int w1() const { return 0; }
  int b1() const { return shape_.hidden1 * shape_.input; }
  int w2() const { return b1() + shape_.hidden1; }
  int b2() const { return w2() + shape_.hidden2 * shape_.hidden1; }
  int wh0() const { return b2() + shape_.hidden2; }
  int bh0() const { return wh0() + shape_.hidden2; }
  int wh1() const { return bh0() + 1; }
  int bh1() const { return wh1() + shape_.hidden2; }

  MlpShape shape_;
  int param_count_ = 0;
};

// Adaptive moment estimation with bias correction.
class AdamOptimizer {
 public:
  AdamOptimizer(int param_count, double learning_rate, double beta1 = 0.9,
                double beta2 = 0.999, double epsilon = 1e-8);

  void step(std::span<double> params, std::span<const double> grad);

  double learning_rate() const { return learning_rate_; }
  long steps_taken() const { return steps_; }

 private:
  double learning_rate_;
  double beta1_;
  double beta2_;
  double epsilon_;
  long steps_ = 0;
  std::vector<double> first_moment_;
  std::vector<double> second_moment_;
};

}  // namespace vtmarket

#endif  // VTMARKET_NN_HPP_
