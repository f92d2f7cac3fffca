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

#include "wiq/fusion.hpp"

#include <cmath>
#include <string>

#include "wiq/error.hpp"

namespace wiq {

ActionResult ActionResult::from(ClassDistribution action_dist,
                                ClassDistribution quality_dist) {
  const double w = action_dist.top_probability();
  return {std::move(action_dist), std::move(quality_dist), w};
}

FusionResult fuse(const ActivityRecord& activity) {
  if (activity.actions.empty()) {
    throw Error(ErrorKind::kParameter, "activity has no actions");
  }
  const std::size_t n = activity.actions.front().quality_dist.size();
  std::vector<double> raw(n, 0.0);
  for (std::size_t i = 0; i < activity.actions.size(); ++i) {
    const ActionResult& a = activity.actions[i];
    if (a.quality_dist.size() != n) {
      throw Error(ErrorKind::kDimension,
                  "action " + std::to_string(i) + " has " +
                      std::to_string(a.quality_dist.size()) + " quality classes, expected " +
                      std::to_string(n));
    }
    if (!(a.weight >= 0.0) || !std::isfinite(a.weight)) {
      throw Error(ErrorKind::kParameter, "weight must be finite and non-negative");
    }
    for (std::size_t k = 0; k < n; ++k) raw[k] += a.weight * a.quality_dist[k];
  }
  ClassDistribution dist = ClassDistribution::from_weights(raw);
  const std::size_t decision = dist.argmax();
  return {std::move(raw), std::move(dist), decision};
}

bool rank_k(const ClassDistribution& dist, std::size_t true_class, std::size_t k) {
  const std::size_t n = dist.size();
  if (k < 1 || k > n) throw Error(ErrorKind::kParameter, "k must be in [1, N]");
  if (true_class >= n) throw Error(ErrorKind::kParameter, "true class out of range");
  // Classes ranked ahead of true_class: higher probability, or equal with a
  // lower index.
  std::size_t ahead = 0;
  const double p = dist[true_class];
  for (std::size_t c = 0; c < n; ++c) {
    if (dist[c] > p || (dist[c] == p && c < true_class)) ++ahead;
  }
  return ahead < k;
}

}  // namespace wiq
