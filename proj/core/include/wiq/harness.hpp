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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wiq/learn.hpp"
#include "wiq/signal_sim.hpp"

namespace wiq {

enum class Task {
  kActionRecognition,
  kBodyStatus,
  kDriverId,
  kDriverCategory,
  kFusionEval,
  kAblation,
};
std::string_view to_string(Task task);
Task parse_task(std::string_view text);

enum class SnrBand { kHigh, kLow };
std::string_view to_string(SnrBand band);
SnrBand parse_snr_band(std::string_view text);
// High: 8-11 dB, low: 4-8 dB.
std::pair<double, double> snr_range(SnrBand band);

// Class labels of a task: the six actions, three body statuses, six
// simulated drivers or three driver categories.
std::vector<std::string> default_classes(Task task);

struct ExperimentSpec {
  std::string name;
  Task task = Task::kActionRecognition;
  // Empty means the task's default label set; otherwise it must equal it.
  std::vector<std::string> classes;
  SnrBand snr_band = SnrBand::kHigh;
  int train_per_class = 100;
  int test_per_class = 100;
  std::uint64_t seed = 7;
  TrainConfig cnn;
  SvmConfig svm;
  int knn_k = 3;
  // Training lengths reported for the CNN and SVM (action recognition).
  std::vector<int> iteration_grid = {5, 10, 15, 20, 50, 100};
  // Independent seeds (fusion evaluation).
  int repeats = 1;
  // Action recognition: cut test fragments by boundary detection and
  // pruning instead of ground truth.
  bool detect_test_boundaries = true;

  void validate() const;
  std::vector<std::string> labels() const;
  static ExperimentSpec defaults(Task task);
};

std::string spec_to_json(const ExperimentSpec& spec);
ExperimentSpec spec_from_json(const std::string& text);

// ---- Dataset -----------------------------------------------------------------

struct LabeledTrace {
  std::uint64_t id = 0;
  int label = 0;
  ActionScript script;
  RssTrace clean;
  RssTrace noisy;
};

struct Corpus {
  std::vector<std::string> classes;
  std::vector<LabeledTrace> train;
  std::vector<LabeledTrace> test;
};

// Per-class execution style of a quality class.
struct QualityProfile {
  double speed_scale = 1.0;  // action duration = regular ticks / speed
  double speed_spread = 0.15;
  double extent = 0.8;       // press depth
  double extent_spread = 0.1;
  double gap_ticks = 40.0;   // pause between actions
  double gap_spread = 10.0;
  double jitter_min = 0.0;   // trajectory jitter drawn uniformly in the band
  double jitter_max = 0.05;
};
QualityProfile quality_profile(Task task, int quality_class);

// Action recognition: one single-action trace per sample. Quality tasks: one
// activity trace per sample, activities cycling through the five driving
// templates. Train and test are drawn together and split by a seeded
// shuffle; disjointness is asserted.
Corpus generate_dataset(const ExperimentSpec& spec);
void assert_disjoint(const Corpus& corpus);

// ---- Evaluation ----------------------------------------------------------------

struct ConfusionMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> rows;  // P(predicted c | true r)
  std::vector<std::size_t> counts;        // samples per true class

  // Rows without samples stay zero and are skipped by the averages.
  std::vector<double> per_class_accuracy() const;
  double average_accuracy() const;
};

// Throws kDimension on length mismatch, kParameter on a label outside
// [0, labels.size()).
ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> truths,
                          std::vector<std::string> labels);
double accuracy(std::span<const int> predictions, std::span<const int> truths);

struct Evaluation {
  std::string name;
  ConfusionMatrix confusion;
  double accuracy = 0.0;  // over samples
  std::vector<double> rank_k;  // k = 1..N
};

// Rows of named values; serialized as CSV.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::pair<std::string, std::vector<double>>> rows;

  double at(std::string_view row, std::string_view column) const;
};

struct Report {
  ExperimentSpec spec;
  std::vector<std::string> classes;
  std::vector<Evaluation> evaluations;
  std::vector<Table> tables;
  std::vector<std::pair<std::string, double>> scalars;
  // Wall-clock seconds per stage; kept out of report.json so reports are
  // byte-identical across runs.
  std::vector<std::pair<std::string, double>> runtime;

  const Evaluation& evaluation(std::string_view name) const;
  const Table& table(std::string_view name) const;
  double scalar(std::string_view name) const;

  std::string to_json() const;
  std::string timing_json() const;
  // report.json, timing.json and one CSV per confusion matrix and table.
  void write(const std::filesystem::path& dir) const;
};

// Named groups of quality-feature columns for the ablation study.
struct FeatureSubset {
  std::string name;
  std::vector<std::string> features;
};
// G(3), G(A), R(3), R(A), G(3)+R(A), G(A)+R(A), All.
std::vector<FeatureSubset> ablation_subsets();
// Column indices of quality-feature names. Throws kParameter for an empty
// list or an unknown name.
std::vector<std::size_t> quality_columns(std::span<const std::string> names);

Report run_experiment(const ExperimentSpec& spec);

// The desk-scale suite behind every reported table and figure analogue.
std::vector<ExperimentSpec> default_suite(std::uint64_t seed);
// Runs the suite into out/<name>/ plus out/summary.json. Experiments run on
// `threads` workers; each is single-threaded, so output does not depend on it.
std::vector<Report> reproduce_all(const std::filesystem::path& out, std::uint64_t seed,
                                  int threads = 1);

}  // namespace wiq
