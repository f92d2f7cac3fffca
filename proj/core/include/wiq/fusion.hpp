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
#include <optional>
#include <string>
#include <vector>

#include "wiq/types.hpp"

namespace wiq {

struct ActionResult {
  ClassDistribution action_dist = ClassDistribution::uniform(kActionCount);
  ClassDistribution quality_dist = ClassDistribution::uniform(1);
  double weight = 1.0;  // top probability of action_dist by default

  // Builds a result whose weight is the action distribution's top probability.
  static ActionResult from(ClassDistribution action_dist, ClassDistribution quality_dist);
};

struct ActivityRecord {
  std::vector<ActionResult> actions;
  std::optional<std::string> activity_label;
};

struct FusionResult {
  std::vector<double> raw;        // sum_i w_i p(i, k)
  ClassDistribution distribution;  // raw renormalized
  std::size_t decision = 0;        // argmax, lowest index on ties
};

// Weighted vote over the actions of one activity. Throws kParameter for an
// empty activity or a negative or non-finite weight, kDimension when quality
// distributions disagree in size.
FusionResult fuse(const ActivityRecord& activity);

// True iff true_class is among the k most probable classes; equal
// probabilities are ordered by class index.
bool rank_k(const ClassDistribution& dist, std::size_t true_class, std::size_t k);

}  // namespace wiq
