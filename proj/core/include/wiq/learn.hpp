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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "wiq/features.hpp"
#include "wiq/network.hpp"
#include "wiq/types.hpp"

namespace wiq {

struct LabeledMatrix {
  FeatureMatrix x;
  int label = 0;
};

struct TrainConfig {
  int iterations = 100;  // epochs
  double learning_rate = 0.01;
  int batch_size = 8;
  double momentum = 0.5;
  int hidden = kDefaultHidden;
  std::uint64_t seed = 7;

  void validate() const;
};

// Called after every epoch with the 1-based epoch number, the mean training
// loss of that epoch (measured after the update) and the current parameters.
using EpochCallback =
    std::function<void(int epoch, double mean_loss, const NetworkParams& params)>;

// Mini-batch SGD with momentum on already normalized matrices. Sample order is
// reshuffled every epoch from `cfg.seed`; single-threaded and bit-reproducible.
// Throws kDegenerateDataset unless there are >= 2 classes, each with a sample.
NetworkParams train_network(std::span<const LabeledMatrix> data, int classes,
                            const TrainConfig& cfg, const EpochCallback& on_epoch = {});

// Fits normalization on `data`, then trains. Labels index `labels`.
Model train(std::span<const LabeledMatrix> data, std::vector<std::string> labels,
            const TrainConfig& cfg, const EpochCallback& on_epoch = {});

double mean_loss(const NetworkParams& p, std::span<const LabeledMatrix> data);

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  std::string worst_tensor;
};

// Central finite differences against backprop. Parameters are drawn from
// every non-empty tensor in turn (stratified) until `count` are checked.
// The relative error |a - n| / max(|a|, |n|) is 0 when both are below 1e-8.
GradCheckResult grad_check(const NetworkParams& params, const FeatureMatrix& sample,
                           int label, double epsilon, std::uint64_t seed,
                           std::size_t count = 28, const BackpropHooks& hooks = {});

// ---- Baselines on flattened feature vectors -------------------------------

struct VectorDataset {
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  int classes = 0;

  std::size_t size() const { return x.size(); }
  void validate() const;
};

// Flattens normalized matrices row-major.
VectorDataset flatten(std::span<const LabeledMatrix> data, int classes);

// Vote fractions of the k nearest (Euclidean) training vectors. Distance
// ties keep training order.
ClassDistribution knn_classify(const VectorDataset& train, std::span<const double> query,
                               int k);

struct SvmConfig {
  int iterations = 100;  // epochs
  double lambda = 1e-3;
  std::uint64_t seed = 7;

  void validate() const;
};

struct SvmModel {
  int classes = 0;
  std::size_t dims = 0;
  std::vector<double> weights;  // [classes][dims]
  std::vector<double> bias;     // [classes]

  std::vector<double> margins(std::span<const double> x) const;
};

// One-vs-rest linear SVMs with hinge loss, trained by stochastic subgradient
// steps of size 1 / (lambda * t). The bias is regularized like a weight on a
// constant input.
SvmModel svm_train(const VectorDataset& data, const SvmConfig& cfg);
// Exponential normalization of the one-vs-rest margins.
ClassDistribution svm_classify(const SvmModel& model, std::span<const double> x);

}  // namespace wiq
