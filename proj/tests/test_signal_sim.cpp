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

#include <algorithm>
#include <cmath>

#include "test_util.hpp"
#include "wiq/error.hpp"
#include "wiq/signal_sim.hpp"

namespace wiq {
namespace {

int sign_changes(std::span<const double> x) {
  int changes = 0;
  int last = 0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double d = x[i] - x[i - 1];
    const int s = d > 1e-12 ? 1 : (d < -1e-12 ? -1 : 0);
    if (s != 0 && last != 0 && s != last) ++changes;
    if (s != 0) last = s;
  }
  return changes;
}

TEST(SignalSim, EmptyScriptIsFlat) {
  const auto t = synth_trajectory(ActionScript{}, kDefaultTickSeconds, 100);
  for (const auto& p : t.pedals) {
    ASSERT_EQ(p.positions.size(), 100u);
    for (double v : p.positions) EXPECT_EQ(v, 0.0);
  }
  const auto rss = trajectory_to_rss(t, ChannelModel{});
  for (double v : rss.samples) EXPECT_NEAR(v, ChannelModel{}.base_strength_db, 1e-12);
}

TEST(SignalSim, SingleThrottlePressReachesExtent) {
  ActionScript s;
  ScriptEntry e;
  e.action = Action::kTP;
  e.start_tick = 10;
  e.duration_ticks = 40;
  e.extent = 1.0;
  s.entries = {e};
  const auto t = synth_trajectory(s, kDefaultTickSeconds, 80);
  const auto& th = t[Pedal::kThrottle].positions;
  EXPECT_EQ(th[10], 0.0);
  EXPECT_NEAR(th[50], 1.0, 1e-12);
  for (int i = 11; i <= 50; ++i) EXPECT_GE(th[i], th[i - 1]);
  for (double v : t[Pedal::kClutch].positions) EXPECT_EQ(v, 0.0);
  for (double v : t[Pedal::kBrake].positions) EXPECT_EQ(v, 0.0);
}

TEST(SignalSim, FastProfileIsAtMostHalfRegular) {
  EXPECT_LE(2 * profile_duration(SpeedProfile::kFast), profile_duration(SpeedProfile::kRegular));
  EXPECT_EQ(profile_duration(SpeedProfile::kSlow), 2 * profile_duration(SpeedProfile::kRegular));
}

TEST(SignalSim, GroundTruthEqualsScriptRanges) {
  ActionScript s;
  const auto tpl = activity_template(Activity::kAcceleration);
  ASSERT_EQ(tpl.actions, (std::vector<Action>{Action::kTR, Action::kCP, Action::kCR, Action::kTP}));
  for (std::size_t p = 0; p < kPedalCount; ++p) s.initial_positions[p] = tpl.initially_pressed[p] ? 0.8 : 0.0;
  int tick = 30;
  for (Action a : tpl.actions) {
    ScriptEntry e;
    e.action = a;
    e.start_tick = tick;
    e.extent = is_press(a) ? 0.7 : 1.0;
    s.entries.push_back(e);
    tick = e.end_tick() + 25;
  }
  const auto rss = testing::render(s, tick + 30);
  ASSERT_EQ(rss.ground_truth.size(), s.entries.size());
  for (std::size_t i = 0; i < s.entries.size(); ++i) {
    EXPECT_EQ(rss.ground_truth[i].action, s.entries[i].action);
    EXPECT_EQ(rss.ground_truth[i].start, s.entries[i].start_tick);
    EXPECT_EQ(rss.ground_truth[i].end, s.entries[i].end_tick());
  }
}

TEST(SignalSim, RejectsInvalidScripts) {
  ActionScript overlap = testing::single_action(Action::kTP);
  ScriptEntry e = overlap.entries.front();
  e.action = Action::kCP;
  e.start_tick += 5;
  overlap.entries.push_back(e);
  EXPECT_THROW(overlap.validate(), Error);

  ActionScript release_unpressed;
  ScriptEntry r;
  r.action = Action::kBR;
  release_unpressed.entries = {r};
  EXPECT_THROW(release_unpressed.validate(), Error);

  ActionScript bad_extent = testing::single_action(Action::kTP);
  bad_extent.entries[0].extent = 1.5;
  EXPECT_THROW(bad_extent.validate(), Error);

  try {
    synth_trajectory(overlap, kDefaultTickSeconds, 400);
    FAIL() << "expected script error";
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::kScriptInvalid);
  }
}

TEST(SignalSim, ThrottleResponseStrictlyMonotone) {
  const ChannelModel m;
  double prev = m.response(Pedal::kThrottle, 0.0);
  for (int i = 1; i <= 200; ++i) {
    const double v = m.response(Pedal::kThrottle, i / 200.0);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(SignalSim, ClutchAndBrakeHaveOneInteriorExtremum) {
  const ChannelModel m;
  for (Pedal p : {Pedal::kClutch, Pedal::kBrake}) {
    std::vector<double> curve;
    for (int i = 0; i <= 400; ++i) curve.push_back(m.response(p, i / 400.0));
    EXPECT_EQ(sign_changes(curve), 1) << to_string(p);
  }
}

TEST(SignalSim, BrakePressFallsAndReleaseRises) {
  ActionScript s;
  ScriptEntry bp;
  bp.action = Action::kBP;
  bp.start_tick = 20;
  bp.extent = 0.7;
  ScriptEntry br = bp;
  br.action = Action::kBR;
  br.start_tick = bp.end_tick() + 20;
  s.entries = {bp, br};
  ChannelModel flat;
  flat.multipath_ripple_amplitude = 0.0;
  const auto rss =
      trajectory_to_rss(synth_trajectory(s, kDefaultTickSeconds, br.end_tick() + 20), flat);
  // Presses short of the brake's turning point keep falling; the release mirrors them.
  for (int i = bp.start_tick + 1; i <= bp.end_tick(); ++i) {
    EXPECT_LE(rss.samples[i], rss.samples[i - 1] + 1e-12) << i;
  }
  for (int i = br.start_tick + 1; i <= br.end_tick(); ++i) {
    EXPECT_GE(rss.samples[i], rss.samples[i - 1] - 1e-12) << i;
  }
}

TEST(SignalSim, ClutchPressDipsThenRises) {
  ChannelModel flat;
  flat.multipath_ripple_amplitude = 0.0;
  const auto s = testing::single_action(Action::kCP, 20, SpeedProfile::kRegular, 1.0);
  const auto rss = trajectory_to_rss(synth_trajectory(s, kDefaultTickSeconds, 100), flat);
  const auto& g = rss.ground_truth.front();
  const std::span<const double> inside(rss.samples.data() + g.start, g.end - g.start + 1);
  EXPECT_EQ(sign_changes(inside), 1);
  EXPECT_LT(*std::min_element(inside.begin(), inside.end()), inside.front());
}

TEST(SignalSim, AddNoiseHitsTargetSnr) {
  const auto clean = testing::render(testing::single_action(Action::kBP), 300);
  for (double snr : {4.0, 9.0, 20.0}) {
    const auto noisy = add_noise(clean, snr, 5);
    EXPECT_NEAR(measure_snr_db(clean.samples, noisy.samples), snr, 0.5);
    ASSERT_TRUE(noisy.snr_db.has_value());
    EXPECT_EQ(*noisy.snr_db, snr);
  }
}

TEST(SignalSim, AddNoiseIsDeterministic) {
  const auto clean = testing::render(testing::single_action(Action::kTP), 300);
  EXPECT_EQ(add_noise(clean, 9.0, 42).samples, add_noise(clean, 9.0, 42).samples);
  EXPECT_NE(add_noise(clean, 9.0, 42).samples, add_noise(clean, 9.0, 43).samples);
}

TEST(SignalSim, HighSnrIsNearlyNoiseless) {
  const auto clean = testing::render(testing::single_action(Action::kTP), 300);
  const auto noisy = add_noise(clean, 60.0, 1);
  // Noise power is a millionth of the signal variance.
  const double sigma = std::sqrt(signal_variance(clean.samples) * 1e-6);
  double ss = 0.0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const double d = noisy.samples[i] - clean.samples[i];
    EXPECT_LT(std::abs(d), 6.0 * sigma);
    ss += d * d;
  }
  const double rms = std::sqrt(ss / static_cast<double>(clean.size()));
  EXPECT_NEAR(rms, sigma, 0.15 * sigma);
  EXPECT_LT(rms, 0.01);
}

// Noise power at 4 dB versus 9 dB, measured from the residuals.
TEST(SignalSim, NoisePowerRatioMatchesSnrGap) {
  const auto clean = testing::render(testing::single_action(Action::kCR), 400);
  auto residual_power = [&](double snr) {
    const auto noisy = add_noise(clean, snr, 77);
    double mean = 0.0;
    for (std::size_t i = 0; i < clean.size(); ++i) mean += noisy.samples[i] - clean.samples[i];
    mean /= static_cast<double>(clean.size());
    double p = 0.0;
    for (std::size_t i = 0; i < clean.size(); ++i) {
      const double r = noisy.samples[i] - clean.samples[i] - mean;
      p += r * r;
    }
    return p / static_cast<double>(clean.size());
  };
  EXPECT_NEAR(10.0 * std::log10(residual_power(4.0) / residual_power(9.0)), 5.0, 0.5);
}

TEST(SignalSim, AddNoiseRejectsBadInput) {
  const auto clean = testing::render(testing::single_action(Action::kTP), 300);
  EXPECT_THROW(add_noise(clean, INFINITY, 1), Error);
  ChannelModel no_ripple;
  no_ripple.multipath_ripple_amplitude = 0.0;
  const auto constant = trajectory_to_rss(synth_trajectory({}, kDefaultTickSeconds, 100), no_ripple);
  EXPECT_THROW(add_noise(constant, 9.0, 1), Error);
}

TEST(SignalSim, MismatchedTrajectoriesRejected) {
  auto t = synth_trajectory(testing::single_action(Action::kTP), kDefaultTickSeconds, 200);
  t.pedals[1].positions.pop_back();
  try {
    trajectory_to_rss(t, ChannelModel{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDimension);
  }
}

}  // namespace
}  // namespace wiq
