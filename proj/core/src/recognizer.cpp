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

#include "wiq/recognizer.hpp"

#include <string>

#include "wiq/error.hpp"

namespace wiq {

void ActionRecognizer::validate() const {
  if (model.flavor != Flavor::kAction) {
    throw Error(ErrorKind::kParameter, "action recognizer needs an action-flavor model");
  }
  const auto labels = action_labels();
  if (model.classes() != kActionCount && model.classes() != kActionCount + 1) {
    throw Error(ErrorKind::kDimension, "action model must have 6 or 7 classes");
  }
  for (std::size_t i = 0; i < kActionCount; ++i) {
    if (model.labels[i] != labels[i]) {
      throw Error(ErrorKind::kParameter, "action model label " + std::to_string(i) +
                                             " is " + model.labels[i] + ", expected " +
                                             labels[i]);
    }
  }
  if (has_idle() && model.labels.back() != kIdleLabel) {
    throw Error(ErrorKind::kParameter, "seventh action class must be idle");
  }
}

ClassDistribution ActionRecognizer::raw_distribution(const Fragment& fragment) const {
  return model.predict(action_features(fragment));
}

ClassDistribution ActionRecognizer::action_distribution(const Fragment& fragment) const {
  const ClassDistribution raw = raw_distribution(fragment);
  if (!has_idle()) return raw;
  return ClassDistribution::from_weights(raw.probs().first(kActionCount));
}

ActionScore ActionRecognizer::score(const Fragment& fragment) const {
  const ClassDistribution raw = raw_distribution(fragment);
  std::size_t best = 0;
  for (std::size_t i = 1; i < kActionCount; ++i) {
    if (raw[i] > raw[best]) best = i;
  }
  return {kAllActions[best], raw[best]};
}

ActionScorer ActionRecognizer::scorer() const {
  return [this](const Fragment& f) { return score(f); };
}

ActionRecognizer train_action_recognizer(std::span<const Fragment> fragments,
                                         std::span<const int> labels, bool with_idle,
                                         const TrainConfig& cfg) {
  if (fragments.size() != labels.size()) {
    throw Error(ErrorKind::kDimension, "fragment and label counts differ");
  }
  const int classes = static_cast<int>(kActionCount) + (with_idle ? 1 : 0);
  std::vector<LabeledMatrix> data;
  data.reserve(fragments.size());
  for (std::size_t i = 0; i < fragments.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= classes) {
      throw Error(ErrorKind::kParameter, "action label out of range");
    }
    data.push_back({action_features(fragments[i]), labels[i]});
  }
  std::vector<std::string> names = action_labels();
  if (with_idle) names.emplace_back(kIdleLabel);
  ActionRecognizer r{train(data, std::move(names), cfg)};
  r.validate();
  return r;
}

ClassDistribution QualityRecognizer::classify(const Fragment& fragment, Action action) const {
  const auto& m = models[static_cast<std::size_t>(action)];
  if (!m) {
    throw Error(ErrorKind::kParameter,
                "no quality model for action " + std::string(to_string(action)));
  }
  return m->predict(quality_features(fragment));
}

QualityRecognizer train_quality_recognizer(std::span<const Fragment> fragments,
                                           std::span<const Action> actions,
                                           std::span<const int> quality,
                                           std::vector<std::string> labels,
                                           const TrainConfig& cfg) {
  if (fragments.size() != actions.size() || fragments.size() != quality.size()) {
    throw Error(ErrorKind::kDimension, "fragment, action and quality counts differ");
  }
  const int classes = static_cast<int>(labels.size());
  if (classes < 2) {
    throw Error(ErrorKind::kDegenerateDataset, "need at least two quality classes");
  }
  QualityRecognizer r;
  r.labels = std::move(labels);
  for (std::size_t a = 0; a < kActionCount; ++a) {
    std::vector<LabeledMatrix> data;
    std::vector<int> seen(classes, 0);
    for (std::size_t i = 0; i < fragments.size(); ++i) {
      if (static_cast<std::size_t>(actions[i]) != a) continue;
      if (quality[i] < 0 || quality[i] >= classes) {
        throw Error(ErrorKind::kParameter, "quality label out of range");
      }
      data.push_back({quality_features(fragments[i]), quality[i]});
      seen[quality[i]] = 1;
    }
    int covered = 0;
    for (int s : seen) covered += s;
    if (covered < classes) continue;
    TrainConfig c = cfg;
    c.seed = cfg.seed + 1000003ULL * (a + 1);
    r.models[a] = train(data, r.labels, c);
  }
  return r;
}

ActionResult recognize_action(const Fragment& fragment, const ActionRecognizer& actions,
                              const QualityRecognizer& quality) {
  ClassDistribution a = actions.action_distribution(fragment);
  const Action act = kAllActions[a.argmax()];
  return ActionResult::from(std::move(a), quality.classify(fragment, act));
}

}  // namespace wiq
