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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "test_util.hpp"
#include "wiq/error.hpp"
#include "wiq/types.hpp"

namespace wiq {
namespace {

TEST(Types, ActionPedalMapping) {
  for (Action a : kAllActions) {
    const Pedal p = pedal_of(a);
    EXPECT_EQ(is_press(a) ? press_action(p) : release_action(p), a);
    EXPECT_EQ(parse_action(to_string(a)), a);
  }
  EXPECT_THROW(parse_action("XX"), Error);
}

TEST(Types, EnumNamesRoundTrip) {
  for (auto s : {SpeedProfile::kFast, SpeedProfile::kRegular, SpeedProfile::kSlow}) {
    EXPECT_EQ(parse_speed_profile(to_string(s)), s);
  }
  for (auto a : {Activity::kGroundStart, Activity::kParking, Activity::kHillStart,
                 Activity::kAcceleration, Activity::kDeceleration, Activity::kFree}) {
    EXPECT_EQ(parse_activity(to_string(a)), a);
  }
  EXPECT_EQ(action_labels().size(), kActionCount);
}

TEST(ClassDistribution, RejectsInvalidVectors) {
  EXPECT_THROW(ClassDistribution({}), Error);
  EXPECT_THROW(ClassDistribution({0.5, 0.6}), Error);
  EXPECT_THROW(ClassDistribution({1.2, -0.2}), Error);
  EXPECT_THROW(ClassDistribution({NAN, 1.0}), Error);
  EXPECT_NO_THROW(ClassDistribution({0.25, 0.75}));
}

TEST(ClassDistribution, ArgmaxTakesLowestIndexOnTies) {
  EXPECT_EQ(ClassDistribution({0.4, 0.4, 0.2}).argmax(), 0u);
  EXPECT_EQ(ClassDistribution({0.2, 0.4, 0.4}).argmax(), 1u);
  EXPECT_DOUBLE_EQ(ClassDistribution({0.2, 0.4, 0.4}).top_probability(), 0.4);
}

TEST(ClassDistribution, FromScoresMatchesSoftmax) {
  const std::vector<double> s = {1.0, -2.0, 0.5, 3.0};
  double z = 0.0;
  for (double v : s) z += std::exp(v);
  const auto d = ClassDistribution::from_scores(s);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(d[i], std::exp(s[i]) / z, 1e-15);
}

TEST(ClassDistribution, FromScoresSurvivesLargeScores) {
  const std::vector<double> s = {1000.0, 999.0, -1000.0};
  const auto d = ClassDistribution::from_scores(s);
  EXPECT_NEAR(d[0] + d[1] + d[2], 1.0, 1e-12);
  EXPECT_EQ(d.argmax(), 0u);
}

TEST(ClassDistribution, FromWeights) {
  const std::vector<double> w = {2.0, 6.0};
  const auto d = ClassDistribution::from_weights(w);
  EXPECT_DOUBLE_EQ(d[0], 0.25);
  const std::vector<double> z = {0.0, 0.0, 0.0};
  const auto u = ClassDistribution::from_weights(z);
  EXPECT_DOUBLE_EQ(u[2], 1.0 / 3.0);
  const std::vector<double> neg = {1.0, -1.0};
  EXPECT_THROW(ClassDistribution::from_weights(neg), Error);
}

// Property: any finite score vector normalizes to a distribution.
TEST(ClassDistribution, PropertyNormalizedForRandomScores) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto s = testing::random_vector(1 + seed % 12, seed, -30.0, 30.0);
    const auto d = ClassDistribution::from_scores(s);
    const auto p = d.probs();
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
    for (double v : p) EXPECT_GE(v, 0.0);
  }
}

TEST(ClassDistribution, AuditTracksConstructions) {
  reset_distribution_audit();
  ClassDistribution::uniform(4);
  const std::vector<double> s = {0.1, 0.2};
  ClassDistribution::from_scores(s);
  const auto a = distribution_audit();
  EXPECT_EQ(a.count, 2u);
  EXPECT_LE(a.max_sum_error, 1e-12);
  EXPECT_GE(a.min_probability, 0.0);
}

}  // namespace
}  // namespace wiq
