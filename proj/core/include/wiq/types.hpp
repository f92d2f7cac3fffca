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
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wiq {

enum class Pedal { kClutch = 0, kBrake = 1, kThrottle = 2 };
inline constexpr std::size_t kPedalCount = 3;

// The six indivisible pedal motions, in the order used for class indices.
enum class Action { kCP = 0, kCR = 1, kBP = 2, kBR = 3, kTP = 4, kTR = 5 };
inline constexpr std::size_t kActionCount = 6;
inline constexpr std::array<Action, kActionCount> kAllActions = {
    Action::kCP, Action::kCR, Action::kBP,
    Action::kBR, Action::kTP, Action::kTR};

enum class SpeedProfile { kFast, kRegular, kSlow };

enum class Activity {
  kGroundStart,
  kParking,
  kHillStart,
  kAcceleration,
  kDeceleration,
  kFree,
};

Pedal pedal_of(Action action);
bool is_press(Action action);
Action press_action(Pedal pedal);
Action release_action(Pedal pedal);

std::string_view to_string(Pedal pedal);
std::string_view to_string(Action action);
std::string_view to_string(SpeedProfile profile);
std::string_view to_string(Activity activity);

Action parse_action(std::string_view text);
SpeedProfile parse_speed_profile(std::string_view text);
Activity parse_activity(std::string_view text);

std::vector<std::string> action_labels();

// Normalized probability vector over a fixed set of classes. Construction
// validates non-negativity and unit sum (1e-9), so every instance that
// exists is a proper distribution.
class ClassDistribution {
 public:
  static constexpr double kSumTolerance = 1e-9;

  explicit ClassDistribution(std::vector<double> probs);

  // Exponential normalization of raw scores (max-shifted).
  static ClassDistribution from_scores(std::span<const double> scores);
  // Divides by the sum; a zero vector becomes uniform.
  static ClassDistribution from_weights(std::span<const double> weights);
  static ClassDistribution uniform(std::size_t n);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const noexcept { return probs_; }

  // Lowest index among the maxima.
  std::size_t argmax() const;
  double top_probability() const;

 private:
  std::vector<double> probs_;
};

// Process-wide tally of every ClassDistribution constructed. Used by the
// acceptance suite to report the normalization invariant across a run.
struct DistributionAudit {
  std::size_t count = 0;
  double max_sum_error = 0.0;
  double min_probability = 0.0;
};
DistributionAudit distribution_audit();
void reset_distribution_audit();

}  // namespace wiq
