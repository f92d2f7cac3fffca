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

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>

#include "test_util.hpp"
#include "wiq/harness.hpp"
#include "wiq/io.hpp"

namespace wiq {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int status = -1;
  std::string out;
};

CliRun wiq_cli(const std::string& args) {
  const std::string cmd = std::string(WIQ_CLI_PATH) + " " + args + " 2>&1";
  CliRun r;
  FILE* p = popen(cmd.c_str(), "r");
  if (p == nullptr) return r;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), p) != nullptr) r.out += buf.data();
  const int raw = pclose(p);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("wiq_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

TEST_F(CliTest, SimulateDenoiseSegmentExtract) {
  ActionScript s = testing::single_action(Action::kTP, 100);
  ScriptEntry second = s.entries[0];
  second.action = Action::kTR;
  second.start_tick = 400;
  second.extent = 1.0;
  s.entries.push_back(second);
  write_script(s, path("s.json"));
  ASSERT_EQ(wiq_cli("simulate --script " + path("s.json") + " --snr 10 --seed 3 --out " +
                    path("t.trace")).status, 0);
  const RssTrace t = read_trace(path("t.trace"));
  EXPECT_EQ(t.ground_truth.size(), 2u);
  ASSERT_EQ(wiq_cli("denoise --in " + path("t.trace") + " --out " + path("d.trace")).status, 0);
  ASSERT_EQ(wiq_cli("segment --in " + path("d.trace") + " --out " + path("f.txt")).status, 0);
  const FragmentFile f = read_fragments(path("f.txt"));
  ASSERT_FALSE(f.bounds.empty());
  for (const auto& b : f.bounds) EXPECT_GE(b.sample_count(), 10);
  ASSERT_EQ(wiq_cli("extract --in " + path("f.txt") + " --flavor action --label TP --out " +
                    path("m.matrix")).status, 0);
  std::size_t matrices = 0;
  for (const auto& e : fs::directory_iterator(dir_)) matrices += e.path().extension() == ".matrix";
  EXPECT_EQ(matrices, f.bounds.size());
}

TEST_F(CliTest, SegmentToStdoutPrintsPairs) {
  write_script(testing::single_action(Action::kCP, 100), path("s.json"));
  ASSERT_EQ(wiq_cli("simulate --script " + path("s.json") + " --clean --out " + path("t.trace"))
                .status, 0);
  const CliRun r = wiq_cli("segment --in " + path("t.trace"));
  ASSERT_EQ(r.status, 0);
  int a = 0;
  int b = 0;
  ASSERT_EQ(std::sscanf(r.out.c_str(), "%d,%d", &a, &b), 2);
  EXPECT_LT(a, b);
}

TEST_F(CliTest, ErrorsExitNonZero) {
  EXPECT_NE(wiq_cli("").status, 0);
  EXPECT_NE(wiq_cli("no-such-command").status, 0);
  EXPECT_NE(wiq_cli("denoise --out x").status, 0);
  const CliRun r = wiq_cli("denoise --in " + path("missing.trace") + " --out " + path("x"));
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.out.find("wiq: "), std::string::npos);
  EXPECT_NE(wiq_cli("denoise --in a --out b --rule medium").status, 0);
}

TEST_F(CliTest, TrainThenEval) {
  fs::create_directories(dir_ / "data");
  int n = 0;
  for (Action a : {Action::kTP, Action::kBP}) {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      const RssTrace t = add_noise(testing::render(testing::single_action(a, 80), 300), 10.0, seed);
      const std::string name = "t" + std::to_string(n++);
      write_trace(t, dir_ / (name + ".trace"));
      const GroundTruth& g = t.ground_truth.front();
      write_fragments({name + ".trace", {{g.start, g.end}}}, dir_ / (name + ".frag"));
      ASSERT_EQ(wiq_cli("extract --in " + path(name + ".frag") + " --flavor action --label " +
                        std::string(to_string(a)) + " --out " + path("data/" + name + ".matrix"))
                    .status, 0);
    }
  }
  // Action labels are the full six-way set; missing classes make training fail.
  EXPECT_EQ(wiq_cli("train --flavor action --data " + path("data") + " --out " + path("m.txt"))
                .status, 1);
  ASSERT_EQ(wiq_cli("train --flavor quality --data " + path("data") + " --out " + path("m.txt"))
                .status, 1);
  for (const auto& e : fs::directory_iterator(dir_ / "data")) {
    MatrixFile m = read_matrix(e.path());
    m.matrix.flavor = Flavor::kQuality;
    write_matrix(m, e.path());
  }
  const CliRun t = wiq_cli("train --flavor quality --iters 10 --hidden 8 --data " + path("data") +
                        " --out " + path("m.txt"));
  ASSERT_EQ(t.status, 0) << t.out;
  EXPECT_NE(t.out.find("trained 12 samples, 2 classes"), std::string::npos);
  const CliRun e = wiq_cli("eval --model " + path("m.txt") + " --data " + path("data"));
  ASSERT_EQ(e.status, 0) << e.out;
  EXPECT_NE(e.out.find("samples 12"), std::string::npos);
  EXPECT_NE(e.out.find("average_accuracy"), std::string::npos);
}

TEST_F(CliTest, FuseMatchesLibrary) {
  ActivityResults r;
  r.quality_labels = {"d1", "d2", "d3"};
  for (int i = 0; i < 4; ++i) {
    auto a = testing::random_vector(kActionCount, 30 + i, 0.1, 1.0);
    auto q = testing::random_vector(3, 40 + i, 0.1, 1.0);
    r.record.actions.push_back(ActionResult::from(ClassDistribution::from_weights(a),
                                                  ClassDistribution::from_weights(q)));
  }
  write_activity_results(r, path("r.csv"));
  ASSERT_EQ(wiq_cli("fuse --in " + path("r.csv") + " --out " + path("d.json")).status, 0);
  const ActivityResults back = read_activity_results(path("r.csv"));
  EXPECT_EQ(read_text(path("d.json")), decision_to_json(fuse(back.record), back.quality_labels));
}

TEST_F(CliTest, RunWritesReportAndAudit) {
  ExperimentSpec s = ExperimentSpec::defaults(Task::kDriverCategory);
  s.name = "cli_small";
  s.train_per_class = 4;
  s.test_per_class = 2;
  s.cnn.iterations = 3;
  s.cnn.hidden = 8;
  write_text(path("spec.json"), spec_to_json(s));
  const CliRun r = wiq_cli("run --spec " + path("spec.json") + " --out " + path("out"));
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_TRUE(fs::exists(dir_ / "out" / "report.json"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "timing.json"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "confusion_fused.csv"));
  EXPECT_NE(r.out.find("distributions "), std::string::npos);
}

}  // namespace
}  // namespace wiq
