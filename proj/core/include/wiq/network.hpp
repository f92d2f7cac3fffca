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

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wiq/features.hpp"
#include "wiq/types.hpp"

namespace wiq {

// Layer sizes of the 5-layer network on a 10x10 input:
//   conv1 (6 kernels 3x3, valid)   -> 6 x 8 x 8
//   pool1 (2x2 mean, scale + bias) -> 6 x 4 x 4
//   conv2 (2 kernels 3x3 applied to every map) -> 12 x 2 x 2
//   pool2 (2x2 mean, scale + bias) -> 12 x 1 x 1
//   fully connected                -> 12
inline constexpr int kInputSide = 10;
inline constexpr int kKernelSide = 3;
inline constexpr int kConv1Maps = 6;
inline constexpr int kConv1Side = 8;
inline constexpr int kPool1Side = 4;
inline constexpr int kConv2Kernels = 2;
inline constexpr int kConv2Maps = kConv1Maps * kConv2Kernels;
inline constexpr int kConv2Side = 2;
inline constexpr int kPool2Side = 1;
inline constexpr int kCnnOutput = 12;
inline constexpr int kDefaultHidden = 96;

struct Shape3 {
  int channels = 0;
  int height = 0;
  int width = 0;

  std::size_t size() const {
    return static_cast<std::size_t>(channels) * height * width;
  }
  bool operator==(const Shape3&) const = default;
};

struct Tensor3 {
  Shape3 shape;
  std::vector<double> data;

  Tensor3() = default;
  explicit Tensor3(Shape3 s) : shape(s), data(s.size(), 0.0) {}
  double& at(int c, int i, int j) {
    return data[(static_cast<std::size_t>(c) * shape.height + i) * shape.width + j];
  }
  double at(int c, int i, int j) const {
    return data[(static_cast<std::size_t>(c) * shape.height + i) * shape.width + j];
  }
};

struct CnnParams {
  std::vector<double> conv1_weight;  // [6][3][3]
  std::vector<double> conv1_bias;    // [6]
  std::vector<double> pool1_scale;   // [6]
  std::vector<double> pool1_bias;    // [6]
  std::vector<double> conv2_weight;  // [2][3][3], shared across input maps
  std::vector<double> conv2_bias;    // [12], output map 2m+k
  std::vector<double> pool2_scale;   // [12]
  std::vector<double> pool2_bias;    // [12]
  std::vector<double> fc_weight;     // [12][12]
  std::vector<double> fc_bias;       // [12]

  static CnnParams zeros();
  static CnnParams random(std::mt19937_64& rng);
};

// Normalized multilayer perceptron head: optional tanh hidden layer, then an
// exponential normalization over the classes. hidden == 0 drops the hidden
// layer (output weights are then classes x 12).
struct NmlpParams {
  int hidden = kDefaultHidden;
  int classes = 0;
  std::vector<double> hidden_weight;  // [hidden][12]
  std::vector<double> hidden_bias;    // [hidden]
  std::vector<double> out_weight;     // [classes][hidden or 12]
  std::vector<double> out_bias;       // [classes]

  static NmlpParams zeros(int classes, int hidden = kDefaultHidden);
  static NmlpParams random(int classes, int hidden, std::mt19937_64& rng);
  int out_inputs() const { return hidden > 0 ? hidden : kCnnOutput; }
};

struct NetworkParams {
  CnnParams cnn;
  NmlpParams nmlp;

  static NetworkParams zeros(int classes, int hidden = kDefaultHidden);
  static NetworkParams random(int classes, int hidden, std::uint64_t seed);
  NetworkParams zeros_like() const;
};

// Visits every parameter tensor in declared (serialization) order.
void for_each_tensor(NetworkParams& p,
                     const std::function<void(std::string_view, std::vector<double>&)>& f);
void for_each_tensor(const NetworkParams& p,
                     const std::function<void(std::string_view, const std::vector<double>&)>& f);
std::size_t parameter_count(const NetworkParams& p);

// Every intermediate of a forward pass; layer outputs are post-activation.
struct CnnActivations {
  Tensor3 input;
  Tensor3 conv1;
  Tensor3 pool1_mean;
  Tensor3 pool1;
  Tensor3 conv2;
  Tensor3 pool2_mean;
  Tensor3 pool2;
  std::vector<double> output;
};

// Throws kDimension if any layer boundary leaves the declared shape chain.
CnnActivations cnn_forward_trace(const FeatureMatrix& input, const CnnParams& p);
std::vector<double> cnn_forward(const FeatureMatrix& input, const CnnParams& p);

struct NmlpActivations {
  std::vector<double> input;
  std::vector<double> hidden;
  std::vector<double> scores;
};
NmlpActivations nmlp_forward(std::span<const double> features, const NmlpParams& p);
ClassDistribution nmlp_classify(std::span<const double> features, const NmlpParams& p);

// Test hook for the gradient checker's sensitivity check.
struct BackpropHooks {
  double fc_gradient_scale = 1.0;
};

// Cross-entropy of the normalized output against `label`; gradients are
// accumulated (added) into `grad`.
double loss_and_gradient(const NetworkParams& p, const FeatureMatrix& input,
                         int label, NetworkParams& grad,
                         const BackpropHooks& hooks = {});
double loss(const NetworkParams& p, const FeatureMatrix& input, int label);

// A trained recognizer: normalization fitted on its training split, the
// network, and the class labels.
struct Model {
  static constexpr int kFormatVersion = 1;

  Flavor flavor = Flavor::kAction;
  std::vector<std::string> labels;
  NormalizationStats norm = NormalizationStats::identity(Flavor::kAction);
  NetworkParams net;

  std::size_t classes() const { return labels.size(); }
  // Normalizes a raw matrix and runs CNN + NMLP.
  ClassDistribution predict(const FeatureMatrix& raw) const;
};

}  // namespace wiq
