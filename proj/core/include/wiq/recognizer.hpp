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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wiq/boundary.hpp"
#include "wiq/features.hpp"
#include "wiq/fusion.hpp"
#include "wiq/learn.hpp"
#include "wiq/types.hpp"

namespace wiq {

inline constexpr std::string_view kIdleLabel = "idle";
inline constexpr int kIdleClass = static_cast<int>(kActionCount);

// Action classifier over the six actions, optionally with a seventh "idle"
// class for fragments that hold no complete action. The idle class lets the
// same network score candidate fragments during boundary pruning.
struct ActionRecognizer {
  Model model;

  bool has_idle() const { return model.classes() == kActionCount + 1; }
  void validate() const;

  // Network output over every class, idle included.
  ClassDistribution raw_distribution(const Fragment& fragment) const;
  // Distribution over the six actions, renormalized without the idle mass.
  ClassDistribution action_distribution(const Fragment& fragment) const;
  // Most probable action and its (not renormalized) probability.
  ActionScore score(const Fragment& fragment) const;
  ActionScorer scorer() const;
};

// labels: action index 0..5, or kIdleClass when with_idle is set.
ActionRecognizer train_action_recognizer(std::span<const Fragment> fragments,
                                         std::span<const int> labels, bool with_idle,
                                         const TrainConfig& cfg);

// One quality network per action type; the recognized action selects it.
struct QualityRecognizer {
  std::vector<std::string> labels;
  std::array<std::optional<Model>, kActionCount> models;

  // Throws kParameter when no model was trained for `action`.
  ClassDistribution classify(const Fragment& fragment, Action action) const;
};

// quality: class index into `labels`. An action type without samples of
// every quality class gets no model.
QualityRecognizer train_quality_recognizer(std::span<const Fragment> fragments,
                                           std::span<const Action> actions,
                                           std::span<const int> quality,
                                           std::vector<std::string> labels,
                                           const TrainConfig& cfg);

// Recognizes the action, then grades it with the matching quality network.
ActionResult recognize_action(const Fragment& fragment, const ActionRecognizer& actions,
                              const QualityRecognizer& quality);

}  // namespace wiq
