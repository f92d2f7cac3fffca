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

#include "wiq/types.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>

#include "wiq/error.hpp"

namespace wiq {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kScriptInvalid: return "script-invalid";
    case ErrorKind::kDimension: return "dimension";
    case ErrorKind::kParameter: return "parameter";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kInputTooShort: return "input-too-short";
    case ErrorKind::kFragmentTooShort: return "fragment-too-short";
    case ErrorKind::kDegenerateDataset: return "degenerate-dataset";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kStage: return "stage";
  }
  return "unknown";
}

Pedal pedal_of(Action action) {
  switch (action) {
    case Action::kCP:
    case Action::kCR: return Pedal::kClutch;
    case Action::kBP:
    case Action::kBR: return Pedal::kBrake;
    case Action::kTP:
    case Action::kTR: return Pedal::kThrottle;
  }
  return Pedal::kClutch;
}

bool is_press(Action action) {
  return action == Action::kCP || action == Action::kBP ||
         action == Action::kTP;
}

Action press_action(Pedal pedal) {
  switch (pedal) {
    case Pedal::kClutch: return Action::kCP;
    case Pedal::kBrake: return Action::kBP;
    case Pedal::kThrottle: return Action::kTP;
  }
  return Action::kCP;
}

Action release_action(Pedal pedal) {
  switch (pedal) {
    case Pedal::kClutch: return Action::kCR;
    case Pedal::kBrake: return Action::kBR;
    case Pedal::kThrottle: return Action::kTR;
  }
  return Action::kCR;
}

std::string_view to_string(Pedal pedal) {
  switch (pedal) {
    case Pedal::kClutch: return "clutch";
    case Pedal::kBrake: return "brake";
    case Pedal::kThrottle: return "throttle";
  }
  return "?";
}

std::string_view to_string(Action action) {
  static constexpr std::array<std::string_view, kActionCount> kNames = {
      "CP", "CR", "BP", "BR", "TP", "TR"};
  return kNames[static_cast<std::size_t>(action)];
}

std::string_view to_string(SpeedProfile profile) {
  switch (profile) {
    case SpeedProfile::kFast: return "fast";
    case SpeedProfile::kRegular: return "regular";
    case SpeedProfile::kSlow: return "slow";
  }
  return "?";
}

std::string_view to_string(Activity activity) {
  switch (activity) {
    case Activity::kGroundStart: return "ground-start";
    case Activity::kParking: return "parking";
    case Activity::kHillStart: return "hill-start";
    case Activity::kAcceleration: return "acceleration";
    case Activity::kDeceleration: return "deceleration";
    case Activity::kFree: return "free";
  }
  return "?";
}

Action parse_action(std::string_view text) {
  for (Action a : kAllActions) {
    if (to_string(a) == text) return a;
  }
  throw Error(ErrorKind::kFormat, "unknown action '" + std::string(text) + "'");
}

SpeedProfile parse_speed_profile(std::string_view text) {
  for (SpeedProfile p :
       {SpeedProfile::kFast, SpeedProfile::kRegular, SpeedProfile::kSlow}) {
    if (to_string(p) == text) return p;
  }
  throw Error(ErrorKind::kFormat,
              "unknown speed profile '" + std::string(text) + "'");
}

Activity parse_activity(std::string_view text) {
  for (Activity a : {Activity::kGroundStart, Activity::kParking,
                     Activity::kHillStart, Activity::kAcceleration,
                     Activity::kDeceleration, Activity::kFree}) {
    if (to_string(a) == text) return a;
  }
  throw Error(ErrorKind::kFormat, "unknown activity '" + std::string(text) + "'");
}

std::vector<std::string> action_labels() {
  std::vector<std::string> labels;
  for (Action a : kAllActions) labels.emplace_back(to_string(a));
  return labels;
}

namespace {

std::mutex& audit_mutex() {
  static std::mutex m;
  return m;
}

DistributionAudit& audit_state() {
  static DistributionAudit state;
  return state;
}

void record(double sum_error, double min_prob) {
  std::lock_guard lock(audit_mutex());
  auto& s = audit_state();
  if (s.count == 0) {
    s.min_probability = min_prob;
  } else {
    s.min_probability = std::min(s.min_probability, min_prob);
  }
  ++s.count;
  s.max_sum_error = std::max(s.max_sum_error, sum_error);
}

}  // namespace

ClassDistribution::ClassDistribution(std::vector<double> probs)
    : probs_(std::move(probs)) {
  if (probs_.empty()) {
    throw Error(ErrorKind::kDimension, "empty class distribution");
  }
  double sum = 0.0;
  double min_prob = probs_.front();
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0) {
      throw Error(ErrorKind::kParameter,
                  "class distribution has a negative or non-finite entry");
    }
    sum += p;
    min_prob = std::min(min_prob, p);
  }
  const double err = std::abs(sum - 1.0);
  if (err > kSumTolerance) {
    throw Error(ErrorKind::kParameter,
                "class distribution sums to " + std::to_string(sum));
  }
  record(err, min_prob);
}

ClassDistribution ClassDistribution::from_scores(std::span<const double> scores) {
  if (scores.empty()) {
    throw Error(ErrorKind::kDimension, "empty score vector");
  }
  const double top = *std::max_element(scores.begin(), scores.end());
  std::vector<double> e(scores.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    e[i] = std::exp(scores[i] - top);
    sum += e[i];
  }
  for (double& v : e) v /= sum;
  return ClassDistribution(std::move(e));
}

ClassDistribution ClassDistribution::from_weights(std::span<const double> weights) {
  if (weights.empty()) {
    throw Error(ErrorKind::kDimension, "empty weight vector");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw Error(ErrorKind::kParameter, "negative or non-finite weight");
    }
    sum += w;
  }
  if (sum <= 0.0) return uniform(weights.size());
  std::vector<double> p(weights.begin(), weights.end());
  for (double& v : p) v /= sum;
  return ClassDistribution(std::move(p));
}

ClassDistribution ClassDistribution::uniform(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::kDimension, "empty class distribution");
  return ClassDistribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

std::size_t ClassDistribution::argmax() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs_.size(); ++i) {
    if (probs_[i] > probs_[best]) best = i;
  }
  return best;
}

double ClassDistribution::top_probability() const { return probs_[argmax()]; }

DistributionAudit distribution_audit() {
  std::lock_guard lock(audit_mutex());
  return audit_state();
}

void reset_distribution_audit() {
  std::lock_guard lock(audit_mutex());
  audit_state() = DistributionAudit{};
}

}  // namespace wiq
