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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace vtmarket {
namespace {

TEST(TwoHeadMlpTest, DeterministicInitAndForward) {
  const TwoHeadMlp mlp(MlpShape{4, 8, 8});
  std::vector<double> a(mlp.param_count());
  std::vector<double> b(mlp.param_count());
  Rng rng_a(123);
  Rng rng_b(123);
  mlp.init_params(a, rng_a);
  mlp.init_params(b, rng_b);
  EXPECT_EQ(a, b);
  const std::vector<double> x{0.1, 0.5, 0.9, 0.3};
  const auto out_a = mlp.forward(a, x);
  const auto out_b = mlp.forward(b, x);
  EXPECT_EQ(out_a.head0, out_b.head0);
  EXPECT_EQ(out_a.head1, out_b.head1);
  EXPECT_TRUE(std::isfinite(out_a.head0));
  EXPECT_TRUE(std::isfinite(out_a.head1));
}

TEST(TwoHeadMlpTest, Head0StartsNearZero) {
  const TwoHeadMlp mlp(MlpShape{12, 64, 64});
  std::vector<double> params(mlp.param_count());
  Rng rng(5);
  mlp.init_params(params, rng);
  const std::vector<double> x(12, 0.5);
  const auto out = mlp.forward(params, x);
  EXPECT_LT(std::abs(out.head0), 0.05);
}

// Backward pass against central finite differences on a weighted-head loss.
TEST(TwoHeadMlpTest, GradientMatchesFiniteDifferences) {
  const TwoHeadMlp mlp(MlpShape{5, 7, 6});
  std::vector<double> params(mlp.param_count());
  Rng rng(99);
  mlp.init_params(params, rng);
  std::vector<double> x(5);
  for (double& v : x) v = rng.uniform(-1.0, 1.0);

  const double c0 = 0.7;
  const double c1 = -1.3;
  auto loss = [&](std::span<const double> p) {
    const auto out = mlp.forward(p, x);
    return c0 * out.head0 + c1 * out.head1;
  };

  TwoHeadMlp::Workspace workspace;
  mlp.forward(params, x, &workspace);
  std::vector<double> grad(mlp.param_count(), 0.0);
  mlp.backward(params, workspace, c0, c1, grad);

  std::vector<double> probe = params;
  for (int i = 0; i < mlp.param_count(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(params[i]));
    const double saved = probe[i];
    probe[i] = saved + h;
    const double up = loss(probe);
    probe[i] = saved - h;
    const double down = loss(probe);
    probe[i] = saved;
    const double fd = (up - down) / (2.0 * h);
    EXPECT_NEAR(grad[i], fd, 1e-6 * std::max({1.0, std::abs(fd)}))
        << "param " << i;
  }
}

TEST(TwoHeadMlpTest, BackwardAccumulates) {
  const TwoHeadMlp mlp(MlpShape{3, 4, 4});
  std::vector<double> params(mlp.param_count());
  Rng rng(1);
  mlp.init_params(params, rng);
  const std::vector<double> x{0.2, -0.4, 0.6};
  TwoHeadMlp::Workspace workspace;
  mlp.forward(params, x, &workspace);
  std::vector<double> once(mlp.param_count(), 0.0);
  mlp.backward(params, workspace, 1.0, 0.5, once);
  std::vector<double> twice(mlp.param_count(), 0.0);
  mlp.backward(params, workspace, 1.0, 0.5, twice);
  mlp.backward(params, workspace, 1.0, 0.5, twice);
  for (int i = 0; i < mlp.param_count(); ++i) {
    EXPECT_NEAR(twice[i], 2.0 * once[i], 1e-15 + 1e-12 * std::abs(once[i]));
  }
}

TEST(AdamOptimizerTest, FirstStepMovesAgainstGradient) {
  AdamOptimizer opt(3, 0.01);
  std::vector<double> params{1.0, -2.0, 0.5};
  const std::vector<double> grad{1.0, -1.0, 0.0};
  opt.step(params, grad);
  // Bias-corrected first step has magnitude ~lr for a unit gradient.
  EXPECT_NEAR(params[0], 1.0 - 0.01, 1e-6);
  EXPECT_NEAR(params[1], -2.0 + 0.01, 1e-6);
  EXPECT_DOUBLE_EQ(params[2], 0.5);
  EXPECT_EQ(opt.steps_taken(), 1);
}

TEST(AdamOptimizerTest, ConvergesOnQuadratic) {
  AdamOptimizer opt(1, 0.05);
  std::vector<double> params{3.0};
  for (int i = 0; i < 2000; ++i) {
    const std::vector<double> grad{2.0 * (params[0] - 1.5)};
    opt.step(params, grad);
  }
  EXPECT_NEAR(params[0], 1.5, 1e-3);
}

}  // namespace
}  // namespace vtmarket
