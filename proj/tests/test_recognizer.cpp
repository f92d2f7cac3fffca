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

#include <random>

#include "test_util.hpp"
#include "wiq/boundary.hpp"
#include "wiq/error.hpp"
#include "wiq/preprocess.hpp"
#include "wiq/recognizer.hpp"

namespace wiq {
namespace {

// Ground-truth fragment of a single noisy action.
Fragment action_fragment(Action a, std::uint64_t seed, SpeedProfile speed = SpeedProfile::kRegular) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> extent(0.6, 1.0);
  const RssTrace clean = testing::render(testing::single_action(a, 60, speed, extent(rng)), 300);
  const RssTrace noisy = add_noise(clean, 10.0, seed);
  const GroundTruth& gt = clean.ground_truth.front();
  return make_fragment(noisy, gradient(noisy), {gt.start, gt.end});
}

struct Fixture {
  std::vector<Fragment> fragments;
  std::vector<int> labels;
  std::vector<Action> actions;
  std::vector<int> quality;
};

// Quality class 0 is regular speed, class 1 is slow.
const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture out;
    std::uint64_t seed = 1;
    for (Action a : kAllActions) {
      for (int i = 0; i < 24; ++i) {
        const int q = i % 2;
        out.fragments.push_back(
            action_fragment(a, seed++, q == 0 ? SpeedProfile::kRegular : SpeedProfile::kSlow));
        out.labels.push_back(static_cast<int>(a));
        out.actions.push_back(a);
        out.quality.push_back(q);
      }
    }
    return out;
  }();
  return f;
}

TrainConfig quick() {
  TrainConfig c;
  c.iterations = 20;
  c.hidden = 24;
  return c;
}

TEST(ActionRecognizer, IdleClassIsStrippedFromActionDistribution) {
  const Fixture& f = fixture();
  std::vector<Fragment> frags = f.fragments;
  std::vector<int> labels = f.labels;
  // Flat noise stands in for idle fragments.
  for (int i = 0; i < 6; ++i) {
    RssTrace flat;
    flat.samples.assign(200, -40.0);
    flat = add_noise_sigma(flat, 0.05, 500 + i);
    frags.push_back(make_fragment(flat, gradient(flat), {20, 120}));
    labels.push_back(kIdleClass);
  }
  const ActionRecognizer r = train_action_recognizer(frags, labels, true, quick());
  EXPECT_TRUE(r.has_idle());
  for (std::size_t i = 0; i < frags.size(); i += 7) {
    const ClassDistribution raw = r.raw_distribution(frags[i]);
    const ClassDistribution act = r.action_distribution(frags[i]);
    ASSERT_EQ(raw.size(), kActionCount + 1);
    ASSERT_EQ(act.size(), kActionCount);
    double kept = 0.0;
    for (std::size_t k = 0; k < kActionCount; ++k) kept += raw[k];
    for (std::size_t k = 0; k < kActionCount; ++k) EXPECT_NEAR(act[k], raw[k] / kept, 1e-12);
    const ActionScore s = r.score(frags[i]);
    EXPECT_EQ(s.action, kAllActions[act.argmax()]);
    EXPECT_DOUBLE_EQ(s.probability, raw[act.argmax()]);
  }
}

TEST(ActionRecognizer, LearnsCleanActions) {
  const Fixture& f = fixture();
  TrainConfig cfg = quick();
  cfg.iterations = 80;
  const ActionRecognizer r = train_action_recognizer(f.fragments, f.labels, false, cfg);
  EXPECT_FALSE(r.has_idle());
  int hits = 0;
  for (Action a : kAllActions) {
    for (std::uint64_t s = 0; s < 5; ++s) {
      hits += r.action_distribution(action_fragment(a, 900 + s)).argmax() ==
              static_cast<std::size_t>(a);
    }
  }
  EXPECT_GE(hits, 24);
}

TEST(ActionRecognizer, ValidatesModel) {
  const Fixture& f = fixture();
  EXPECT_THROW(train_action_recognizer(f.fragments, std::vector<int>(3, 0), false, quick()),
               Error);
  std::vector<int> bad = f.labels;
  bad[0] = kIdleClass;
  EXPECT_THROW(train_action_recognizer(f.fragments, bad, false, quick()), Error);
  ActionRecognizer r;
  r.model.labels = {"a", "b"};
  EXPECT_THROW(r.validate(), Error);
}

TEST(QualityRecognizer, OneModelPerCoveredAction) {
  const Fixture& f = fixture();
  std::vector<Fragment> frags;
  std::vector<Action> acts;
  std::vector<int> q;
  for (std::size_t i = 0; i < f.fragments.size(); ++i) {
    // Brake release only ever has class 0, so it gets no model.
    if (f.actions[i] == Action::kBR && f.quality[i] == 1) continue;
    frags.push_back(f.fragments[i]);
    acts.push_back(f.actions[i]);
    q.push_back(f.quality[i]);
  }
  const QualityRecognizer r = train_quality_recognizer(frags, acts, q, {"regular", "slow"}, quick());
  for (Action a : kAllActions) {
    EXPECT_EQ(r.models[static_cast<std::size_t>(a)].has_value(), a != Action::kBR);
  }
  EXPECT_THROW(r.classify(frags[0], Action::kBR), Error);
  const ClassDistribution d = r.classify(frags[0], acts[0]);
  EXPECT_EQ(d.size(), 2u);
}

TEST(QualityRecognizer, RejectsBadInput) {
  const Fixture& f = fixture();
  EXPECT_THROW(train_quality_recognizer(f.fragments, f.actions, f.quality, {"one"}, quick()),
               Error);
  std::vector<int> q = f.quality;
  q[0] = 2;
  EXPECT_THROW(train_quality_recognizer(f.fragments, f.actions, q, {"a", "b"}, quick()), Error);
  EXPECT_THROW(train_quality_recognizer(f.fragments, std::vector<Action>(1), f.quality,
                                        {"a", "b"}, quick()),
               Error);
}

TEST(RecognizeAction, WeightIsTopActionProbability) {
  const Fixture& f = fixture();
  const ActionRecognizer actions = train_action_recognizer(f.fragments, f.labels, false, quick());
  const QualityRecognizer quality =
      train_quality_recognizer(f.fragments, f.actions, f.quality, {"regular", "slow"}, quick());
  for (std::size_t i = 0; i < f.fragments.size(); i += 5) {
    const ActionResult r = recognize_action(f.fragments[i], actions, quality);
    EXPECT_DOUBLE_EQ(r.weight, r.action_dist.top_probability());
    EXPECT_EQ(r.quality_dist.size(), 2u);
  }
}

}  // namespace
}  // namespace wiq
