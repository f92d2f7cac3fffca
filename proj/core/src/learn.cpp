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

#include "wiq/learn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "wiq/error.hpp"

namespace wiq {
namespace {

void check_classes(std::span<const int> labels, int classes) {
  if (classes < 2) {
    throw Error(ErrorKind::kDegenerateDataset, "need at least two classes");
  }
  std::vector<int> seen(classes, 0);
  for (int y : labels) {
    if (y < 0 || y >= classes) {
      throw Error(ErrorKind::kParameter, "label " + std::to_string(y) + " out of range");
    }
    ++seen[y];
  }
  for (int c = 0; c < classes; ++c) {
    if (seen[c] == 0) {
      throw Error(ErrorKind::kDegenerateDataset,
                  "class " + std::to_string(c) + " has no samples");
    }
  }
}

std::vector<int> labels_of(std::span<const LabeledMatrix> data) {
  std::vector<int> y;
  y.reserve(data.size());
  for (const auto& d : data) y.push_back(d.label);
  return y;
}

// Fisher-Yates with an explicit draw so the order does not depend on the
// standard library's shuffle implementation.
void shuffle(std::vector<std::size_t>& order, std::mt19937_64& rng) {
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = rng() % i;
    std::swap(order[i - 1], order[j]);
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (iterations < 1) throw Error(ErrorKind::kConfig, "iterations must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorKind::kConfig, "learning_rate must be > 0");
  }
  if (batch_size < 1) throw Error(ErrorKind::kConfig, "batch_size must be >= 1");
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw Error(ErrorKind::kConfig, "momentum must be in [0, 1)");
  }
  if (hidden < 0) throw Error(ErrorKind::kConfig, "hidden must be >= 0");
}

double mean_loss(const NetworkParams& p, std::span<const LabeledMatrix> data) {
  if (data.empty()) return 0.0;
  double total = 0.0;
  for (const auto& d : data) total += loss(p, d.x, d.label);
  return total / static_cast<double>(data.size());
}

NetworkParams train_network(std::span<const LabeledMatrix> data, int classes,
                            const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  check_classes(labels_of(data), classes);

  NetworkParams params = NetworkParams::random(classes, cfg.hidden, cfg.seed);
  NetworkParams velocity = params.zeros_like();
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (int epoch = 1; epoch <= cfg.iterations; ++epoch) {
    shuffle(order, rng);
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
      NetworkParams grad = params.zeros_like();
      for (std::size_t i = begin; i < end; ++i) {
        const auto& d = data[order[i]];
        loss_and_gradient(params, d.x, d.label, grad);
      }
      const double scale = cfg.learning_rate / static_cast<double>(end - begin);
      std::vector<std::vector<double>*> g;
      std::vector<std::vector<double>*> v;
      for_each_tensor(grad, [&](std::string_view, std::vector<double>& t) { g.push_back(&t); });
      for_each_tensor(velocity, [&](std::string_view, std::vector<double>& t) { v.push_back(&t); });
      std::size_t k = 0;
      for_each_tensor(params, [&](std::string_view, std::vector<double>& t) {
        auto& gt = *g[k];
        auto& vt = *v[k];
        for (std::size_t i = 0; i < t.size(); ++i) {
          vt[i] = cfg.momentum * vt[i] - scale * gt[i];
          t[i] += vt[i];
        }
        ++k;
      });
    }
    if (on_epoch) on_epoch(epoch, mean_loss(params, data), params);
  }
  return params;
}

Model train(std::span<const LabeledMatrix> data, std::vector<std::string> labels,
            const TrainConfig& cfg, const EpochCallback& on_epoch) {
  if (data.empty()) throw Error(ErrorKind::kDegenerateDataset, "empty training set");
  const Flavor flavor = data.front().x.flavor;
  std::vector<FeatureMatrix> raw;
  raw.reserve(data.size());
  for (const auto& d : data) {
    if (d.x.flavor != flavor) {
      throw Error(ErrorKind::kParameter, "mixed feature flavors in training set");
    }
    raw.push_back(d.x);
  }
  Model m;
  m.flavor = flavor;
  m.labels = std::move(labels);
  m.norm = fit_normalization(raw);
  std::vector<LabeledMatrix> norm;
  norm.reserve(data.size());
  for (const auto& d : data) norm.push_back({normalize(d.x, m.norm), d.label});
  m.net = train_network(norm, static_cast<int>(m.labels.size()), cfg, on_epoch);
  return m;
}

GradCheckResult grad_check(const NetworkParams& params, const FeatureMatrix& sample,
                           int label, double epsilon, std::uint64_t seed,
                           std::size_t count, const BackpropHooks& hooks) {
  if (!(epsilon >= 1e-7 && epsilon <= 1e-3)) {
    throw Error(ErrorKind::kParameter, "epsilon must be in [1e-7, 1e-3]");
  }
  NetworkParams analytic = params.zeros_like();
  loss_and_gradient(params, sample, label, analytic, hooks);

  NetworkParams probe = params;
  std::vector<std::pair<std::string_view, std::vector<double>*>> tensors;
  std::vector<const std::vector<double>*> grads;
  for_each_tensor(probe, [&](std::string_view n, std::vector<double>& t) {
    if (!t.empty()) tensors.emplace_back(n, &t);
  });
  for_each_tensor(analytic, [&](std::string_view, std::vector<double>& t) {
    if (!t.empty()) grads.push_back(&t);
  });

  std::mt19937_64 rng(seed);
  GradCheckResult r;
  for (std::size_t n = 0; n < count; ++n) {
    const std::size_t k = n % tensors.size();
    auto& t = *tensors[k].second;
    const std::size_t i = rng() % t.size();
    const double saved = t[i];
    t[i] = saved + epsilon;
    const double up = loss(probe, sample, label);
    t[i] = saved - epsilon;
    const double down = loss(probe, sample, label);
    t[i] = saved;
    const double numeric = (up - down) / (2.0 * epsilon);
    const double a = (*grads[k])[i];
    const double denom = std::max(std::abs(a), std::abs(numeric));
    const double err = denom < 1e-8 ? 0.0 : std::abs(a - numeric) / denom;
    if (r.worst_tensor.empty() || err > r.max_relative_error) {
      r.max_relative_error = err;
      r.worst_tensor = std::string(tensors[k].first);
    }
    ++r.checked;
  }
  return r;
}

void VectorDataset::validate() const {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::kDimension, "feature and label counts differ");
  }
  if (x.empty()) throw Error(ErrorKind::kDegenerateDataset, "empty dataset");
  for (const auto& v : x) {
    if (v.size() != x.front().size()) {
      throw Error(ErrorKind::kDimension, "ragged feature vectors");
    }
  }
  for (int label : y) {
    if (label < 0 || label >= classes) {
      throw Error(ErrorKind::kParameter, "label " + std::to_string(label) + " out of range");
    }
  }
}

VectorDataset flatten(std::span<const LabeledMatrix> data, int classes) {
  VectorDataset d;
  d.classes = classes;
  for (const auto& s : data) {
    d.x.emplace_back(s.x.values.begin(), s.x.values.end());
    d.y.push_back(s.label);
  }
  return d;
}

ClassDistribution knn_classify(const VectorDataset& train, std::span<const double> query,
                               int k) {
  train.validate();
  if (k < 1 || static_cast<std::size_t>(k) > train.size()) {
    throw Error(ErrorKind::kParameter, "k must be in [1, train size]");
  }
  if (query.size() != train.x.front().size()) {
    throw Error(ErrorKind::kDimension, "query dimension differs from training set");
  }
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < query.size(); ++j) {
      const double d = train.x[i][j] - query[j];
      s += d * d;
    }
    dist.emplace_back(s, i);
  }
  std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
  std::vector<double> votes(train.classes, 0.0);
  for (int i = 0; i < k; ++i) votes[train.y[dist[i].second]] += 1.0;
  for (double& v : votes) v /= k;
  return ClassDistribution(std::move(votes));
}

void SvmConfig::validate() const {
  if (iterations < 1) throw Error(ErrorKind::kConfig, "iterations must be >= 1");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorKind::kConfig, "lambda must be > 0");
  }
}

std::vector<double> SvmModel::margins(std::span<const double> x) const {
  if (x.size() != dims) {
    throw Error(ErrorKind::kDimension, "svm input has " + std::to_string(x.size()) +
                                           " dims, expected " + std::to_string(dims));
  }
  std::vector<double> m(classes, 0.0);
  for (int c = 0; c < classes; ++c) {
    double s = bias[c];
    for (std::size_t j = 0; j < dims; ++j) s += weights[c * dims + j] * x[j];
    m[c] = s;
  }
  return m;
}

SvmModel svm_train(const VectorDataset& data, const SvmConfig& cfg) {
  cfg.validate();
  data.validate();
  check_classes(data.y, data.classes);
  SvmModel m;
  m.classes = data.classes;
  m.dims = data.x.front().size();
  m.weights.assign(static_cast<std::size_t>(m.classes) * m.dims, 0.0);
  m.bias.assign(m.classes, 0.0);

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // The returned model averages the iterates of the final epoch.
  std::vector<double> avg_w(m.weights.size(), 0.0);
  std::vector<double> avg_b(m.bias.size(), 0.0);
  double t = 0.0;
  for (int epoch = 0; epoch < cfg.iterations; ++epoch) {
    const bool last = epoch + 1 == cfg.iterations;
    shuffle(order, rng);
    for (std::size_t idx : order) {
      t += 1.0;
      const double eta = 1.0 / (cfg.lambda * t);
      const auto& x = data.x[idx];
      for (int c = 0; c < m.classes; ++c) {
        const double y = data.y[idx] == c ? 1.0 : -1.0;
        double* w = &m.weights[c * m.dims];
        double s = m.bias[c];
        for (std::size_t j = 0; j < m.dims; ++j) s += w[j] * x[j];
        const double shrink = 1.0 - eta * cfg.lambda;
        for (std::size_t j = 0; j < m.dims; ++j) w[j] *= shrink;
        m.bias[c] *= shrink;
        if (y * s < 1.0) {
          for (std::size_t j = 0; j < m.dims; ++j) w[j] += eta * y * x[j];
          m.bias[c] += eta * y;
        }
      }
      if (last) {
        for (std::size_t j = 0; j < avg_w.size(); ++j) avg_w[j] += m.weights[j];
        for (std::size_t j = 0; j < avg_b.size(); ++j) avg_b[j] += m.bias[j];
      }
    }
  }
  const double n = static_cast<double>(order.size());
  for (std::size_t j = 0; j < avg_w.size(); ++j) m.weights[j] = avg_w[j] / n;
  for (std::size_t j = 0; j < avg_b.size(); ++j) m.bias[j] = avg_b[j] / n;
  return m;
}

ClassDistribution svm_classify(const SvmModel& model, std::span<const double> x) {
  return ClassDistribution::from_scores(model.margins(x));
}

}  // namespace wiq
