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

#include <filesystem>
#include <random>

#include <nlohmann/json.hpp>

#include "test_util.hpp"
#include "wiq/error.hpp"
#include "wiq/io.hpp"

namespace wiq {
namespace {

namespace fs = std::filesystem;

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("wiq_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST(FormatDouble, RoundTripsExactly) {
  for (double v : testing::random_vector(200, 3, -1e6, 1e6)) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(std::stod(format_double(0.1)), 0.1);
}

TEST_F(IoTest, TraceWithGroundTruth) {
  ActionScript s = testing::single_action(Action::kBP);
  s.quality_class = 2;
  const RssTrace t = add_noise(testing::render(s, 250), 9.0, 4);
  write_trace(t, dir_ / "t.trace");
  EXPECT_TRUE(fs::exists(ground_truth_path(dir_ / "t.trace")));
  const RssTrace back = read_trace(dir_ / "t.trace");
  EXPECT_EQ(back.samples, t.samples);
  EXPECT_EQ(back.ground_truth, t.ground_truth);
  EXPECT_EQ(back.snr_db, t.snr_db);
  EXPECT_EQ(back.tick_seconds, t.tick_seconds);
}

TEST_F(IoTest, TraceWithoutGroundTruthDropsStaleSidecar) {
  RssTrace t = testing::render(testing::single_action(Action::kTP), 200);
  write_trace(t, dir_ / "t.trace");
  t.ground_truth.clear();
  write_trace(t, dir_ / "t.trace");
  EXPECT_FALSE(fs::exists(ground_truth_path(dir_ / "t.trace")));
  EXPECT_FALSE(read_trace(dir_ / "t.trace").snr_db.has_value());
}

TEST_F(IoTest, TraceLengthMismatchIsAFormatError) {
  write_text(dir_ / "bad.trace", "wiq-trace 1 tick_seconds=0.005 snr_db=none length=3\n1\n2\n");
  try {
    read_trace(dir_ / "bad.trace");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kFormat);
  }
  write_text(dir_ / "bad2.trace", "not-a-trace\n");
  EXPECT_THROW(read_trace(dir_ / "bad2.trace"), Error);
  EXPECT_THROW(read_trace(dir_ / "missing.trace"), Error);
}

TEST(Script, JsonRoundTrip) {
  ActionScript s;
  s.activity = Activity::kHillStart;
  s.quality_class = 1;
  s.initial_positions = {0.0, 0.8, 0.0};
  ScriptEntry a;
  a.action = Action::kBR;
  a.start_tick = 10;
  a.extent = 1.0;
  a.speed = SpeedProfile::kSlow;
  ScriptEntry b;
  b.action = Action::kTP;
  b.start_tick = 200;
  b.duration_ticks = 40;
  b.extent = 0.55;
  b.jitter = 0.05;
  b.jitter_seed = 99;
  s.entries = {a, b};
  const ActionScript back = script_from_json(script_to_json(s));
  EXPECT_EQ(back.activity, s.activity);
  EXPECT_EQ(back.quality_class, 1);
  EXPECT_EQ(back.initial_positions, s.initial_positions);
  ASSERT_EQ(back.entries.size(), 2u);
  EXPECT_EQ(back.entries[1].duration_ticks, 40);
  EXPECT_EQ(back.entries[1].extent, 0.55);
  EXPECT_EQ(back.entries[1].jitter_seed, 99u);
  EXPECT_EQ(back.entries[0].speed, SpeedProfile::kSlow);
  EXPECT_THROW(script_from_json("{"), Error);
  EXPECT_THROW(script_from_json(R"({"entries":[{"action":"XX","start_tick":0}]})"), Error);
}

TEST_F(IoTest, FragmentsRoundTrip) {
  const FragmentFile f{"a.trace", {{3, 40}, {60, 99}}};
  write_fragments(f, dir_ / "f.txt");
  const FragmentFile back = read_fragments(dir_ / "f.txt");
  EXPECT_EQ(back.trace, f.trace);
  EXPECT_EQ(back.bounds, f.bounds);
  EXPECT_THROW(write_fragments({"a b", {}}, dir_ / "g.txt"), Error);
}

TEST_F(IoTest, MatrixRoundTripAndDirectoryOrder) {
  MatrixFile m;
  m.matrix.flavor = Flavor::kQuality;
  const auto v = testing::random_vector(100, 8);
  std::copy(v.begin(), v.end(), m.matrix.values.begin());
  m.label = "fatigue";
  write_matrix(m, dir_ / "b.matrix");
  m.label.reset();
  write_matrix(m, dir_ / "a.matrix");
  write_text(dir_ / "skip.txt", "x");
  const auto all = read_matrix_dir(dir_);
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0].first.filename(), "a.matrix");
  EXPECT_FALSE(all[0].second.label.has_value());
  EXPECT_EQ(all[1].second.label, "fatigue");
  EXPECT_EQ(all[1].second.matrix.values, m.matrix.values);
  EXPECT_EQ(all[1].second.matrix.flavor, Flavor::kQuality);
  m.label = "two words";
  EXPECT_THROW(write_matrix(m, dir_ / "c.matrix"), Error);
}

TEST(Model, TextRoundTripPredictsIdentically) {
  Model m;
  m.flavor = Flavor::kAction;
  m.labels = {"x", "y", "z"};
  m.net = NetworkParams::random(3, 7, 5);
  m.norm.flavor = Flavor::kAction;
  for (std::size_t c = 0; c < kFeatures; ++c) {
    m.norm.shift[c] = 0.1 * static_cast<double>(c);
    m.norm.scale[c] = 1.0 + static_cast<double>(c);
  }
  const Model back = model_from_text(model_to_text(m));
  EXPECT_EQ(back.labels, m.labels);
  EXPECT_EQ(back.net.nmlp.hidden, 7);
  EXPECT_EQ(model_to_text(back), model_to_text(m));
  FeatureMatrix x;
  x.flavor = Flavor::kAction;
  const auto v = testing::random_vector(100, 2);
  std::copy(v.begin(), v.end(), x.values.begin());
  const auto a = m.predict(x);
  const auto b = back.predict(x);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(a[k], b[k]);
  EXPECT_THROW(model_from_text("wiq-model 2\n"), Error);
  std::string cut = model_to_text(m);
  cut.resize(cut.size() / 2);
  EXPECT_THROW(model_from_text(cut), Error);
}

TEST_F(IoTest, ActivityResultsRoundTrip) {
  ActivityResults r;
  r.quality_labels = {"low", "mid", "high"};
  std::mt19937_64 rng(1);
  for (int i = 0; i < 3; ++i) {
    auto a = testing::random_vector(kActionCount, 10 + i, 0.1, 1.0);
    auto q = testing::random_vector(3, 20 + i, 0.1, 1.0);
    r.record.actions.push_back(ActionResult::from(ClassDistribution::from_weights(a),
                                                  ClassDistribution::from_weights(q)));
  }
  write_activity_results(r, dir_ / "r.csv");
  const ActivityResults back = read_activity_results(dir_ / "r.csv");
  EXPECT_EQ(back.quality_labels, r.quality_labels);
  ASSERT_EQ(back.record.actions.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back.record.actions[i].weight, r.record.actions[i].weight);
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_EQ(back.record.actions[i].quality_dist[k], r.record.actions[i].quality_dist[k]);
    }
  }
  write_text(dir_ / "bad.csv", "a_CP,w\n");
  EXPECT_THROW(read_activity_results(dir_ / "bad.csv"), Error);
}

TEST(Decision, JsonCarriesDistribution) {
  ActivityRecord rec;
  rec.actions.push_back(ActionResult::from(ClassDistribution::uniform(kActionCount),
                                           ClassDistribution({0.2, 0.8})));
  const FusionResult f = fuse(rec);
  const std::vector<std::string> labels = {"calm", "tired"};
  const auto j = nlohmann::json::parse(decision_to_json(f, labels));
  EXPECT_EQ(j.at("decision"), "tired");
  EXPECT_EQ(j.at("decision_index"), 1);
  EXPECT_NEAR(j.at("distribution").at("calm").get<double>(), 0.2, 1e-12);
  EXPECT_THROW(decision_to_json(f, std::vector<std::string>{"one"}), Error);
}

}  // namespace
}  // namespace wiq
