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

#include "wiq/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wiq/error.hpp"

namespace wiq {
namespace {

constexpr Shape3 kInputShape{1, kInputSide, kInputSide};
constexpr Shape3 kConv1Shape{kConv1Maps, kConv1Side, kConv1Side};
constexpr Shape3 kPool1Shape{kConv1Maps, kPool1Side, kPool1Side};
constexpr Shape3 kConv2Shape{kConv2Maps, kConv2Side, kConv2Side};
constexpr Shape3 kPool2Shape{kConv2Maps, kPool2Side, kPool2Side};
constexpr int kKernelSize = kKernelSide * kKernelSide;

void expect_shape(const Tensor3& t, Shape3 want, const char* layer) {
  if (!(t.shape == want) || t.data.size() != want.size()) {
    throw Error(ErrorKind::kDimension,
                std::string(layer) + ": expected " + std::to_string(want.channels) +
                    "x" + std::to_string(want.height) + "x" + std::to_string(want.width) +
                    ", got " + std::to_string(t.shape.channels) + "x" +
                    std::to_string(t.shape.height) + "x" + std::to_string(t.shape.width));
  }
}

void expect_size(const std::vector<double>& v, std::size_t n, const char* name) {
  if (v.size() != n) {
    throw Error(ErrorKind::kDimension, std::string(name) + ": expected " +
                                           std::to_string(n) + " values, got " +
                                           std::to_string(v.size()));
  }
}

void check_params(const CnnParams& p) {
  expect_size(p.conv1_weight, kConv1Maps * kKernelSize, "conv1.weight");
  expect_size(p.conv1_bias, kConv1Maps, "conv1.bias");
  expect_size(p.pool1_scale, kConv1Maps, "pool1.scale");
  expect_size(p.pool1_bias, kConv1Maps, "pool1.bias");
  expect_size(p.conv2_weight, kConv2Kernels * kKernelSize, "conv2.weight");
  expect_size(p.conv2_bias, kConv2Maps, "conv2.bias");
  expect_size(p.pool2_scale, kConv2Maps, "pool2.scale");
  expect_size(p.pool2_bias, kConv2Maps, "pool2.bias");
  expect_size(p.fc_weight, kCnnOutput * kConv2Maps, "fc.weight");
  expect_size(p.fc_bias, kCnnOutput, "fc.bias");
}

void check_params(const NmlpParams& p) {
  if (p.classes < 1 || p.hidden < 0) {
    throw Error(ErrorKind::kDimension, "nmlp: bad layer sizes");
  }
  const auto h = static_cast<std::size_t>(p.hidden);
  const auto c = static_cast<std::size_t>(p.classes);
  expect_size(p.hidden_weight, h * kCnnOutput, "nmlp.hidden.weight");
  expect_size(p.hidden_bias, h, "nmlp.hidden.bias");
  expect_size(p.out_weight, c * static_cast<std::size_t>(p.out_inputs()), "nmlp.out.weight");
  expect_size(p.out_bias, c, "nmlp.out.bias");
}

void fill_uniform(std::vector<double>& v, int fan_in, std::mt19937_64& rng) {
  // Variance 1 / fan_in.
  const double a = std::sqrt(3.0 / fan_in);
  std::uniform_real_distribution<double> u(-a, a);
  for (double& x : v) x = u(rng);
}

// 2x2 mean pooling with a learned per-map scale and bias.
void pool(const Tensor3& in, const std::vector<double>& scale,
          const std::vector<double>& bias, Tensor3& mean, Tensor3& out) {
  for (int c = 0; c < out.shape.channels; ++c) {
    for (int i = 0; i < out.shape.height; ++i) {
      for (int j = 0; j < out.shape.width; ++j) {
        const double m = 0.25 * (in.at(c, 2 * i, 2 * j) + in.at(c, 2 * i, 2 * j + 1) +
                                 in.at(c, 2 * i + 1, 2 * j) +
                                 in.at(c, 2 * i + 1, 2 * j + 1));
        mean.at(c, i, j) = m;
        out.at(c, i, j) = scale[c] * m + bias[c];
      }
    }
  }
}

std::vector<double> softmax(std::span<const double> s) {
  const double mx = *std::max_element(s.begin(), s.end());
  std::vector<double> p(s.size());
  double z = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    p[i] = std::exp(s[i] - mx);
    z += p[i];
  }
  for (double& x : p) x /= z;
  return p;
}

}  // namespace

CnnParams CnnParams::zeros() {
  CnnParams p;
  p.conv1_weight.assign(kConv1Maps * kKernelSize, 0.0);
  p.conv1_bias.assign(kConv1Maps, 0.0);
  p.pool1_scale.assign(kConv1Maps, 0.0);
  p.pool1_bias.assign(kConv1Maps, 0.0);
  p.conv2_weight.assign(kConv2Kernels * kKernelSize, 0.0);
  p.conv2_bias.assign(kConv2Maps, 0.0);
  p.pool2_scale.assign(kConv2Maps, 0.0);
  p.pool2_bias.assign(kConv2Maps, 0.0);
  p.fc_weight.assign(kCnnOutput * kConv2Maps, 0.0);
  p.fc_bias.assign(kCnnOutput, 0.0);
  return p;
}

CnnParams CnnParams::random(std::mt19937_64& rng) {
  CnnParams p = zeros();
  fill_uniform(p.conv1_weight, kKernelSize, rng);
  fill_uniform(p.conv2_weight, kKernelSize, rng);
  fill_uniform(p.fc_weight, kConv2Maps, rng);
  std::fill(p.pool1_scale.begin(), p.pool1_scale.end(), 1.0);
  std::fill(p.pool2_scale.begin(), p.pool2_scale.end(), 1.0);
  return p;
}

NmlpParams NmlpParams::zeros(int classes, int hidden) {
  if (classes < 1 || hidden < 0) {
    throw Error(ErrorKind::kParameter, "nmlp needs classes >= 1 and hidden >= 0");
  }
  NmlpParams p;
  p.hidden = hidden;
  p.classes = classes;
  p.hidden_weight.assign(static_cast<std::size_t>(hidden) * kCnnOutput, 0.0);
  p.hidden_bias.assign(hidden, 0.0);
  p.out_weight.assign(static_cast<std::size_t>(classes) * p.out_inputs(), 0.0);
  p.out_bias.assign(classes, 0.0);
  return p;
}

NmlpParams NmlpParams::random(int classes, int hidden, std::mt19937_64& rng) {
  NmlpParams p = zeros(classes, hidden);
  fill_uniform(p.hidden_weight, kCnnOutput, rng);
  fill_uniform(p.out_weight, p.out_inputs(), rng);
  return p;
}

NetworkParams NetworkParams::zeros(int classes, int hidden) {
  return {CnnParams::zeros(), NmlpParams::zeros(classes, hidden)};
}

NetworkParams NetworkParams::random(int classes, int hidden, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  NetworkParams p;
  p.cnn = CnnParams::random(rng);
  p.nmlp = NmlpParams::random(classes, hidden, rng);
  return p;
}

NetworkParams NetworkParams::zeros_like() const {
  return zeros(nmlp.classes, nmlp.hidden);
}

void for_each_tensor(NetworkParams& p,
                     const std::function<void(std::string_view, std::vector<double>&)>& f) {
  f("conv1.weight", p.cnn.conv1_weight);
  f("conv1.bias", p.cnn.conv1_bias);
  f("pool1.scale", p.cnn.pool1_scale);
  f("pool1.bias", p.cnn.pool1_bias);
  f("conv2.weight", p.cnn.conv2_weight);
  f("conv2.bias", p.cnn.conv2_bias);
  f("pool2.scale", p.cnn.pool2_scale);
  f("pool2.bias", p.cnn.pool2_bias);
  f("fc.weight", p.cnn.fc_weight);
  f("fc.bias", p.cnn.fc_bias);
  f("nmlp.hidden.weight", p.nmlp.hidden_weight);
  f("nmlp.hidden.bias", p.nmlp.hidden_bias);
  f("nmlp.out.weight", p.nmlp.out_weight);
  f("nmlp.out.bias", p.nmlp.out_bias);
}

void for_each_tensor(const NetworkParams& p,
                     const std::function<void(std::string_view, const std::vector<double>&)>& f) {
  for_each_tensor(const_cast<NetworkParams&>(p),
                  [&](std::string_view n, std::vector<double>& v) { f(n, v); });
}

std::size_t parameter_count(const NetworkParams& p) {
  std::size_t n = 0;
  for_each_tensor(p, [&](std::string_view, const std::vector<double>& v) { n += v.size(); });
  return n;
}

CnnActivations cnn_forward_trace(const FeatureMatrix& input, const CnnParams& p) {
  check_params(p);
  CnnActivations a;
  a.input = Tensor3(kInputShape);
  std::copy(input.values.begin(), input.values.end(), a.input.data.begin());
  expect_shape(a.input, kInputShape, "input");

  a.conv1 = Tensor3(kConv1Shape);
  for (int m = 0; m < kConv1Maps; ++m) {
    const double* w = &p.conv1_weight[m * kKernelSize];
    for (int i = 0; i < kConv1Side; ++i) {
      for (int j = 0; j < kConv1Side; ++j) {
        double z = p.conv1_bias[m];
        for (int u = 0; u < kKernelSide; ++u) {
          for (int v = 0; v < kKernelSide; ++v) {
            z += w[u * kKernelSide + v] * a.input.at(0, i + u, j + v);
          }
        }
        a.conv1.at(m, i, j) = std::tanh(z);
      }
    }
  }
  expect_shape(a.conv1, kConv1Shape, "conv1");

  a.pool1_mean = Tensor3(kPool1Shape);
  a.pool1 = Tensor3(kPool1Shape);
  pool(a.conv1, p.pool1_scale, p.pool1_bias, a.pool1_mean, a.pool1);
  expect_shape(a.pool1, kPool1Shape, "pool1");

  a.conv2 = Tensor3(kConv2Shape);
  for (int m = 0; m < kConv1Maps; ++m) {
    for (int k = 0; k < kConv2Kernels; ++k) {
      const int o = m * kConv2Kernels + k;
      const double* w = &p.conv2_weight[k * kKernelSize];
      for (int i = 0; i < kConv2Side; ++i) {
        for (int j = 0; j < kConv2Side; ++j) {
          double z = p.conv2_bias[o];
          for (int u = 0; u < kKernelSide; ++u) {
            for (int v = 0; v < kKernelSide; ++v) {
              z += w[u * kKernelSide + v] * a.pool1.at(m, i + u, j + v);
            }
          }
          a.conv2.at(o, i, j) = std::tanh(z);
        }
      }
    }
  }
  expect_shape(a.conv2, kConv2Shape, "conv2");

  a.pool2_mean = Tensor3(kPool2Shape);
  a.pool2 = Tensor3(kPool2Shape);
  pool(a.conv2, p.pool2_scale, p.pool2_bias, a.pool2_mean, a.pool2);
  expect_shape(a.pool2, kPool2Shape, "pool2");

  a.output.assign(kCnnOutput, 0.0);
  for (int r = 0; r < kCnnOutput; ++r) {
    double z = p.fc_bias[r];
    for (int o = 0; o < kConv2Maps; ++o) z += p.fc_weight[r * kConv2Maps + o] * a.pool2.data[o];
    a.output[r] = std::tanh(z);
  }
  expect_size(a.output, kCnnOutput, "fc");
  return a;
}

std::vector<double> cnn_forward(const FeatureMatrix& input, const CnnParams& p) {
  return cnn_forward_trace(input, p).output;
}

NmlpActivations nmlp_forward(std::span<const double> features, const NmlpParams& p) {
  check_params(p);
  if (features.size() != static_cast<std::size_t>(kCnnOutput)) {
    throw Error(ErrorKind::kDimension, "nmlp: expected 12 inputs, got " +
                                           std::to_string(features.size()));
  }
  NmlpActivations a;
  a.input.assign(features.begin(), features.end());
  std::span<const double> x = a.input;
  if (p.hidden > 0) {
    a.hidden.assign(p.hidden, 0.0);
    for (int h = 0; h < p.hidden; ++h) {
      double z = p.hidden_bias[h];
      for (int i = 0; i < kCnnOutput; ++i) z += p.hidden_weight[h * kCnnOutput + i] * a.input[i];
      a.hidden[h] = std::tanh(z);
    }
    x = a.hidden;
  }
  const int n = p.out_inputs();
  a.scores.assign(p.classes, 0.0);
  for (int c = 0; c < p.classes; ++c) {
    double z = p.out_bias[c];
    for (int i = 0; i < n; ++i) z += p.out_weight[c * n + i] * x[i];
    a.scores[c] = z;
  }
  return a;
}

ClassDistribution nmlp_classify(std::span<const double> features, const NmlpParams& p) {
  return ClassDistribution::from_scores(nmlp_forward(features, p).scores);
}

double loss_and_gradient(const NetworkParams& p, const FeatureMatrix& input,
                         int label, NetworkParams& grad,
                         const BackpropHooks& hooks) {
  if (label < 0 || label >= p.nmlp.classes) {
    throw Error(ErrorKind::kParameter, "label out of range");
  }
  check_params(grad.cnn);
  check_params(grad.nmlp);
  const CnnActivations a = cnn_forward_trace(input, p.cnn);
  const NmlpActivations h = nmlp_forward(a.output, p.nmlp);
  const std::vector<double> prob = softmax(h.scores);
  const double l = -std::log(std::max(prob[label], 1e-300));

  // Output layer.
  std::vector<double> dscore = prob;
  dscore[label] -= 1.0;
  const int n = p.nmlp.out_inputs();
  const std::vector<double>& x = p.nmlp.hidden > 0 ? h.hidden : h.input;
  std::vector<double> dx(n, 0.0);
  for (int c = 0; c < p.nmlp.classes; ++c) {
    grad.nmlp.out_bias[c] += dscore[c];
    for (int i = 0; i < n; ++i) {
      grad.nmlp.out_weight[c * n + i] += dscore[c] * x[i];
      dx[i] += p.nmlp.out_weight[c * n + i] * dscore[c];
    }
  }
  std::vector<double> dout(kCnnOutput, 0.0);
  if (p.nmlp.hidden > 0) {
    for (int k = 0; k < p.nmlp.hidden; ++k) {
      const double dz = dx[k] * (1.0 - h.hidden[k] * h.hidden[k]);
      grad.nmlp.hidden_bias[k] += dz;
      for (int i = 0; i < kCnnOutput; ++i) {
        grad.nmlp.hidden_weight[k * kCnnOutput + i] += dz * h.input[i];
        dout[i] += p.nmlp.hidden_weight[k * kCnnOutput + i] * dz;
      }
    }
  } else {
    dout = dx;
  }

  // Fully connected.
  std::vector<double> dpool2(kConv2Maps, 0.0);
  for (int r = 0; r < kCnnOutput; ++r) {
    const double dz = dout[r] * (1.0 - a.output[r] * a.output[r]);
    grad.cnn.fc_bias[r] += hooks.fc_gradient_scale * dz;
    for (int o = 0; o < kConv2Maps; ++o) {
      grad.cnn.fc_weight[r * kConv2Maps + o] += hooks.fc_gradient_scale * dz * a.pool2.data[o];
      dpool2[o] += p.cnn.fc_weight[r * kConv2Maps + o] * dz;
    }
  }

  // Pool2 and conv2.
  Tensor3 dpool1(kPool1Shape);
  for (int m = 0; m < kConv1Maps; ++m) {
    for (int k = 0; k < kConv2Kernels; ++k) {
      const int o = m * kConv2Kernels + k;
      grad.cnn.pool2_scale[o] += dpool2[o] * a.pool2_mean.data[o];
      grad.cnn.pool2_bias[o] += dpool2[o];
      const double dc = dpool2[o] * p.cnn.pool2_scale[o] * 0.25;
      for (int i = 0; i < kConv2Side; ++i) {
        for (int j = 0; j < kConv2Side; ++j) {
          const double y = a.conv2.at(o, i, j);
          const double dz = dc * (1.0 - y * y);
          grad.cnn.conv2_bias[o] += dz;
          for (int u = 0; u < kKernelSide; ++u) {
            for (int v = 0; v < kKernelSide; ++v) {
              grad.cnn.conv2_weight[k * kKernelSize + u * kKernelSide + v] +=
                  dz * a.pool1.at(m, i + u, j + v);
              dpool1.at(m, i + u, j + v) +=
                  dz * p.cnn.conv2_weight[k * kKernelSize + u * kKernelSide + v];
            }
          }
        }
      }
    }
  }

  // Pool1 and conv1.
  for (int m = 0; m < kConv1Maps; ++m) {
    for (int i = 0; i < kPool1Side; ++i) {
      for (int j = 0; j < kPool1Side; ++j) {
        const double d = dpool1.at(m, i, j);
        grad.cnn.pool1_scale[m] += d * a.pool1_mean.at(m, i, j);
        grad.cnn.pool1_bias[m] += d;
        const double dc = d * p.cnn.pool1_scale[m] * 0.25;
        for (int di = 0; di < 2; ++di) {
          for (int dj = 0; dj < 2; ++dj) {
            const int ci = 2 * i + di;
            const int cj = 2 * j + dj;
            const double y = a.conv1.at(m, ci, cj);
            const double dz = dc * (1.0 - y * y);
            grad.cnn.conv1_bias[m] += dz;
            for (int u = 0; u < kKernelSide; ++u) {
              for (int v = 0; v < kKernelSide; ++v) {
                grad.cnn.conv1_weight[m * kKernelSize + u * kKernelSide + v] +=
                    dz * a.input.at(0, ci + u, cj + v);
              }
            }
          }
        }
      }
    }
  }
  return l;
}

double loss(const NetworkParams& p, const FeatureMatrix& input, int label) {
  if (label < 0 || label >= p.nmlp.classes) {
    throw Error(ErrorKind::kParameter, "label out of range");
  }
  const CnnActivations a = cnn_forward_trace(input, p.cnn);
  const std::vector<double> prob = softmax(nmlp_forward(a.output, p.nmlp).scores);
  return -std::log(std::max(prob[label], 1e-300));
}

ClassDistribution Model::predict(const FeatureMatrix& raw) const {
  if (raw.flavor != flavor) {
    throw Error(ErrorKind::kParameter, std::string("model expects ") +
                                           std::string(to_string(flavor)) + " features");
  }
  if (static_cast<int>(labels.size()) != net.nmlp.classes) {
    throw Error(ErrorKind::kDimension, "model label count differs from output size");
  }
  const FeatureMatrix x = raw.normalized ? raw : normalize(raw, norm);
  return nmlp_classify(cnn_forward(x, net.cnn), net.nmlp);
}

}  // namespace wiq
