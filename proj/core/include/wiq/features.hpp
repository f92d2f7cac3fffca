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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wiq/boundary.hpp"

namespace wiq {

inline constexpr std::size_t kSegments = 10;
inline constexpr std::size_t kFeatures = 10;
inline constexpr std::size_t kMatrixSize = kSegments * kFeatures;

enum class Flavor { kQuality, kAction };
std::string_view to_string(Flavor flavor);
Flavor parse_flavor(std::string_view text);

// Column order of the quality matrix.
enum QualityFeature : std::size_t {
  kDuration = 0,
  kGradMax,
  kGradMin,
  kGradMean,
  kGradVar,
  kB1MinusB2,
  kB1MinusGradMax,
  kB1MinusGradMin,
  kB2MinusGradMax,
  kB2MinusGradMin,
};

// Column order of the action matrix.
enum ActionFeature : std::size_t {
  kAverage = 0,
  kRange,
  kMad,
  kVariance,
  kThirdMoment,
  kKurtosis,
  kIqr,
  kSum,
  kRms,
  kSkewness,
};

const std::array<std::string_view, kFeatures>& feature_names(Flavor flavor);

// Ten segments (rows) by ten features (columns), row-major.
struct FeatureMatrix {
  std::array<double, kMatrixSize> values{};
  Flavor flavor = Flavor::kQuality;
  bool normalized = false;

  double& at(std::size_t row, std::size_t col) { return values[row * kFeatures + col]; }
  double at(std::size_t row, std::size_t col) const {
    return values[row * kFeatures + col];
  }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values).subspan(r * kFeatures, kFeatures);
  }
  bool all_finite() const;
};

struct SegmentRange {
  std::size_t offset = 0;
  std::size_t length = 0;
  bool operator==(const SegmentRange&) const = default;
};

// Splits S samples into ten contiguous ranges whose lengths differ by at most
// one; the remainder goes to the leading segments. Needs S >= 10.
std::array<SegmentRange, kSegments> segment10(std::size_t sample_count);
std::array<SegmentRange, kSegments> segment10(const Fragment& fragment);

// Gradient descriptors of one segment.
struct QualityVector {
  double duration = 0.0;  // t_u * (S - 1)
  double g_max = 0.0;
  double g_min = 0.0;
  double g_mean = 0.0;
  double g_var = 0.0;     // sum of squared deviations
  double b1_minus_b2 = 0.0;
  double b1_minus_gmax = 0.0;
  double b1_minus_gmin = 0.0;
  double b2_minus_gmax = 0.0;
  double b2_minus_gmin = 0.0;

  std::array<double, kFeatures> as_row() const;
};
QualityVector quality_vector(std::span<const double> gradients,
                             double tick_seconds);

// Strength statistics of one segment, in action-matrix column order.
std::array<double, kFeatures> strength_statistics(std::span<const double> x);

FeatureMatrix quality_features(const Fragment& fragment);
FeatureMatrix action_features(const Fragment& fragment);
FeatureMatrix extract_features(const Fragment& fragment, Flavor flavor);

// Oscillation range of the strength across a fragment. The sample farthest
// from the S_A -> S_E chord is the turning point S_M when its deviation
// exceeds 3 * noise_scale; the distance is then |S_A - S_M| + |S_M - S_E|,
// otherwise |S_A - S_E|.
double motion_distance(const Fragment& fragment, double noise_scale);
// Uses the fragment's own robust noise estimate.
double motion_distance(const Fragment& fragment);

// Per-feature (column) shift and scale, fitted on training matrices only.
struct NormalizationStats {
  std::array<double, kFeatures> shift{};
  std::array<double, kFeatures> scale{};
  Flavor flavor = Flavor::kQuality;

  static NormalizationStats identity(Flavor flavor);
};

// Mean and population standard deviation of each column over every row of
// every matrix. A zero-variance column keeps scale 1.
NormalizationStats fit_normalization(std::span<const FeatureMatrix> matrices);

// (x - shift) / scale per column. Not idempotent: applying the same stats to
// an already normalized matrix shifts it again.
FeatureMatrix normalize(const FeatureMatrix& matrix, const NormalizationStats& stats);

// Keeps the listed quality-feature columns of every row, flattened row-major.
std::vector<double> select_columns(const FeatureMatrix& matrix,
                                   std::span<const std::size_t> columns);

}  // namespace wiq
