// Copyright 2026 The WiQ Authors
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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "test_util.hpp"
#include "wiq/error.hpp"
#include "wiq/learn.hpp"
#include "wiq/network.hpp"

namespace wiq {
namespace {

FeatureMatrix random_matrix(std::uint64_t seed, double scale = 1.0) {
  FeatureMatrix m;
  const auto v = testing::random_vector(m.values.size(), seed, -scale, scale);
  std::copy(v.begin(), v.end(), m.values.begin());
  return m;
}

// Straight loops over the layer definitions, written without Tensor3.
std::vector<double> reference_cnn(const FeatureMatrix& x, const CnnParams& p) {
  double c1[6][8][8];
  for (int m = 0; m < 6; ++m)
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) {
        double z = p.conv1_bias[m];
        for (int u = 0; u < 3; ++u)
          for (int v = 0; v < 3; ++v) z += p.conv1_weight[m * 9 + u * 3 + v] * x.at(i + u, j + v);
        c1[m][i][j] = std::tanh(z);
      }
  double p1[6][4][4];
  for (int m = 0; m < 6; ++m)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const double mean = (c1[m][2 * i][2 * j] + c1[m][2 * i][2 * j + 1] +
                             c1[m][2 * i + 1][2 * j] + c1[m][2 * i + 1][2 * j + 1]) / 4.0;
        p1[m][i][j] = p.pool1_scale[m] * mean + p.pool1_bias[m];
      }
  double p2[12];
  for (int m = 0; m < 6; ++m)
    for (int k = 0; k < 2; ++k) {
      const int o = 2 * m + k;
      double acc = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          double z = p.conv2_bias[o];
          for (int u = 0; u < 3; ++u)
            for (int v = 0; v < 3; ++v) z += p.conv2_weight[k * 9 + u * 3 + v] * p1[m][i + u][j + v];
          acc += std::tanh(z);
        }
      p2[o] = p.pool2_scale[o] * acc / 4.0 + p.pool2_bias[o];
    }
  std::vector<double> out(12);
  for (int r = 0; r < 12; ++r) {
    double z = p.fc_bias[r];
    for (int o = 0; o < 12; ++o) z += p.fc_weight[r * 12 + o] * p2[o];
    out[r] = std::tanh(z);
  }
  return out;
}

TEST(Cnn, ShapeChainHoldsOnRandomInputs) {
  const NetworkParams net = NetworkParams::random(7, kDefaultHidden, 3);
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto a = cnn_forward_trace(random_matrix(s, 5.0), net.cnn);
    ASSERT_EQ(a.input.shape, (Shape3{1, 10, 10}));
    ASSERT_EQ(a.conv1.shape, (Shape3{6, 8, 8}));
    ASSERT_EQ(a.pool1.shape, (Shape3{6, 4, 4}));
    ASSERT_EQ(a.conv2.shape, (Shape3{12, 2, 2}));
    ASSERT_EQ(a.pool2.shape, (Shape3{12, 1, 1}));
    ASSERT_EQ(a.output.size(), 12u);
    for (double v : a.output) ASSERT_TRUE(std::abs(v) <= 1.0);
  }
}

TEST(Cnn, MatchesReferenceLoops) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const NetworkParams net = NetworkParams::random(4, 8, 100 + s);
    const FeatureMatrix x = random_matrix(s);
    const auto got = cnn_forward(x, net.cnn);
    const auto want = reference_cnn(x, net.cnn);
    for (int r = 0; r < 12; ++r) EXPECT_NEAR(got[r], want[r], 1e-12);
  }
}

TEST(Cnn, ParameterCount) {
  // conv1 60, pool1 12, conv2 18 + 12, pool2 24, fc 156.
  const NetworkParams net = NetworkParams::zeros(6, 24);
  EXPECT_EQ(parameter_count(net), 282u + 24u * 13u + 6u * 25u);
  const NetworkParams flat = NetworkParams::zeros(6, 0);
  EXPECT_EQ(parameter_count(flat), 282u + 6u * 13u);
}

TEST(Nmlp, OutputIsDistribution) {
  const NetworkParams net = NetworkParams::random(5, 16, 9);
  const auto f = testing::random_vector(12, 4);
  const ClassDistribution d = nmlp_classify(f, net.nmlp);
  ASSERT_EQ(d.size(), 5u);
  double sum = 0.0;
  for (double p : d.probs()) {
    EXPECT_GE(p, 0.0);
    sum += p;
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(Nmlp, WrongInputWidthThrows) {
  const NetworkParams net = NetworkParams::random(3, 4, 1);
  const std::vector<double> f(11, 0.0);
  EXPECT_THROW(nmlp_forward(f, net.nmlp), Error);
}

// Without a hidden layer and with zero output bias the scores are linear in
// the input, so a positive rescale cannot move the argmax.
TEST(Nmlp, LinearCaseArgmaxIsScaleInvariant) {
  NetworkParams net = NetworkParams::random(6, 0, 21);
  std::fill(net.nmlp.out_bias.begin(), net.nmlp.out_bias.end(), 0.0);
  for (std::uint64_t s = 0; s < 200; ++s) {
    auto f = testing::random_vector(12, s);
    const std::size_t base = nmlp_classify(f, net.nmlp).argmax();
    for (double c : {0.1, 0.5, 3.0, 40.0}) {
      std::vector<double> g = f;
      for (double& v : g) v *= c;
      EXPECT_EQ(nmlp_classify(g, net.nmlp).argmax(), base);
    }
  }
}

TEST(Backprop, MatchesFiniteDifferences) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const NetworkParams net = NetworkParams::random(6, 24, 40 + s);
    const auto r = grad_check(net, random_matrix(s), static_cast<int>(s % 6), 1e-5, s);
    EXPECT_GE(r.checked, 12u);
    EXPECT_LT(r.max_relative_error, 1e-4) << r.worst_tensor;
  }
}

TEST(Backprop, DetectsScaledFcGradient) {
  const NetworkParams net = NetworkParams::random(6, 24, 5);
  BackpropHooks hooks;
  hooks.fc_gradient_scale = 2.0;
  const auto r = grad_check(net, random_matrix(8), 2, 1e-5, 3, 28, hooks);
  EXPECT_GT(r.max_relative_error, 0.3);
  // The hook scales the whole fully connected layer.
  EXPECT_EQ(r.worst_tensor.rfind("fc.", 0), 0u) << r.worst_tensor;
}

TEST(Backprop, LossMatchesForward) {
  const NetworkParams net = NetworkParams::random(4, 10, 77);
  const FeatureMatrix x = random_matrix(12);
  NetworkParams grad = net.zeros_like();
  const double l = loss_and_gradient(net, x, 1, grad);
  const auto d = nmlp_classify(cnn_forward(x, net.cnn), net.nmlp);
  EXPECT_NEAR(l, -std::log(d[1]), 1e-12);
  EXPECT_THROW(loss(net, x, 4), Error);
}

TEST(Backprop, BadEpsilonThrows) {
  const NetworkParams net = NetworkParams::random(3, 4, 1);
  EXPECT_THROW(grad_check(net, random_matrix(1), 0, 1.0, 1), Error);
}

}  // namespace
}  // namespace wiq
