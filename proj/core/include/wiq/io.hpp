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

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wiq/boundary.hpp"
#include "wiq/features.hpp"
#include "wiq/fusion.hpp"
#include "wiq/network.hpp"
#include "wiq/signal_sim.hpp"

// Plain-text file formats. Every real number is written with 17 significant
// digits so a write/read cycle reproduces it bit for bit.
//
//   trace      wiq-trace 1 tick_seconds=<s> snr_db=<db|none> length=<n>
//              then one strength per line; ground truth goes to a sidecar
//              <path>.gt.csv with rows action,start,end,quality
//   fragments  wiq-fragments 1 trace=<path>, then start,end rows
//   matrix     wiq-matrix 1 flavor=<quality|action> [label=<name>],
//              then 10 rows of 10 comma-separated values
//   model      wiq-model 1, then "key value..." lines; parameter tensors in
//              declared layer order as "<name> <count> <values...>"
//   results    CSV header a_<action>...,q_<label>...,w; one row per action
//   script     JSON (see script_to_json)

namespace wiq {

std::string format_double(double v);

std::filesystem::path ground_truth_path(const std::filesystem::path& trace_path);
void write_trace(const RssTrace& trace, const std::filesystem::path& path);
RssTrace read_trace(const std::filesystem::path& path);

std::string script_to_json(const ActionScript& script);
ActionScript script_from_json(const std::string& text);
ActionScript read_script(const std::filesystem::path& path);
void write_script(const ActionScript& script, const std::filesystem::path& path);

struct FragmentFile {
  std::string trace;
  std::vector<FragmentBounds> bounds;
};
void write_fragments(const FragmentFile& file, const std::filesystem::path& path);
FragmentFile read_fragments(const std::filesystem::path& path);

struct MatrixFile {
  FeatureMatrix matrix;
  std::optional<std::string> label;
};
void write_matrix(const MatrixFile& file, const std::filesystem::path& path);
MatrixFile read_matrix(const std::filesystem::path& path);
// Every *.matrix file of a directory, in file-name order.
std::vector<std::pair<std::filesystem::path, MatrixFile>> read_matrix_dir(
    const std::filesystem::path& dir);

std::string model_to_text(const Model& model);
Model model_from_text(const std::string& text);
void write_model(const Model& model, const std::filesystem::path& path);
Model read_model(const std::filesystem::path& path);

struct ActivityResults {
  std::vector<std::string> quality_labels;
  ActivityRecord record;
};
void write_activity_results(const ActivityResults& results, const std::filesystem::path& path);
ActivityResults read_activity_results(const std::filesystem::path& path);

std::string decision_to_json(const FusionResult& result,
                             std::span<const std::string> quality_labels);

std::string read_text(const std::filesystem::path& path);
// Creates parent directories as needed.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace wiq
