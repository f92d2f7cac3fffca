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

#include "wiq/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wiq/error.hpp"

namespace wiq {

std::string_view to_string(Flavor flavor) {
  return flavor == Flavor::kQuality ? "quality" : "action";
}

Flavor parse_flavor(std::string_view text) {
  if (text == "quality") return Flavor::kQuality;
  if (text == "action") return Flavor::kAction;
  throw Error(ErrorKind::kFormat, "unknown flavor '" + std::string(text) + "'");
}

const std::array<std::string_view, kFeatures>& feature_names(Flavor flavor) {
  static const std::array<std::string_view, kFeatures> kQualityNames = {
      "duration", "g_max", "g_min", "g_mean", "g_var",
      "B1-B2",    "B1-gA", "B1-gI", "B2-gA",  "B2-gI"};
  static const std::array<std::string_view, kFeatures> kActionNames = {
      "average",  "range", "mad", "variance", "third_moment",
      "kurtosis", "iqr",   "sum", "rms",      "skewness"};
  return flavor == Flavor::kQuality ? kQualityNames : kActionNames;
}

bool FeatureMatrix::all_finite() const {
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return std::isfinite(v); });
}

std::array<SegmentRange, kSegments> segment10(std::size_t sample_count) {
  if (sample_count < kSegments) {
    throw Error(ErrorKind::kFragmentTooShort,
                "fragment of " + std::to_string(sample_count) +
                    " samples cannot be split into ten segments");
  }
  const std::size_t base = sample_count / kSegments;
  const std::size_t extra = sample_count % kSegments;
  std::array<SegmentRange, kSegments> out{};
  std::size_t offset = 0;
  for (std::size_t i = 0; i < kSegments; ++i) {
    out[i].offset = offset;
    out[i].length = base + (i < extra ? 1 : 0);
    offset += out[i].length;
  }
  return out;
}

std::array<SegmentRange, kSegments> segment10(const Fragment& fragment) {
  return segment10(fragment.samples.size());
}

std::array<double, kFeatures> QualityVector::as_row() const {
  return {duration,      g_max,         g_min,         g_mean,
          g_var,         b1_minus_b2,   b1_minus_gmax, b1_minus_gmin,
          b2_minus_gmax, b2_minus_gmin};
}

QualityVector quality_vector(std::span<const double> g, double tick_seconds) {
  if (g.empty()) throw Error(ErrorKind::kDimension, "empty segment");
  QualityVector q;
  const double n = static_cast<double>(g.size());
  q.duration = tick_seconds * (n - 1.0);
  q.g_max = *std::max_element(g.begin(), g.end());
  q.g_min = *std::min_element(g.begin(), g.end());
  q.g_mean = std::accumulate(g.begin(), g.end(), 0.0) / n;
  for (double v : g) q.g_var += (v - q.g_mean) * (v - q.g_mean);
  const double b1 = g.front();
  const double b2 = g.back();
  q.b1_minus_b2 = b1 - b2;
  q.b1_minus_gmax = b1 - q.g_max;
  q.b1_minus_gmin = b1 - q.g_min;
  q.b2_minus_gmax = b2 - q.g_max;
  q.b2_minus_gmin = b2 - q.g_min;
  return q;
}

namespace {

// Linear interpolation between order statistics at (n-1)q.
double quantile_sorted(std::span<const double> sorted, double q) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::array<double, kFeatures> strength_statistics(std::span<const double> x) {
  if (x.empty()) throw Error(ErrorKind::kDimension, "empty segment");
  const double n = static_cast<double>(x.size());
  double sum = 0.0;
  double sum_sq = 0.0;
  double sum_cube = 0.0;
  double peak = 0.0;
  for (double v : x) {
    sum += v;
    sum_sq += v * v;
    sum_cube += v * v * v;
    peak = std::max(peak, std::abs(v));
  }
  const double mean = sum / n;
  double abs_dev = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
  for (double v : x) {
    const double d = v - mean;
    abs_dev += std::abs(d);
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  const double ss = m2;
  m2 /= n;
  m3 /= n;
  m4 /= n;

  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());

  // Constant segments carry no shape: skewness and kurtosis are 0 rather
  // than 0/0. The tolerance absorbs rounding in the mean.
  const double tiny = 1e-12 * std::max(1.0, peak);
  const bool flat = m2 <= tiny * tiny;

  std::array<double, kFeatures> out{};
  out[kAverage] = mean;
  out[kRange] = sorted.back() - sorted.front();
  out[kMad] = abs_dev / n;
  out[kVariance] = flat ? 0.0 : ss;
  out[kThirdMoment] = sum_cube / n;
  out[kKurtosis] = flat ? 0.0 : m4 / (m2 * m2) - 3.0;
  out[kIqr] = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  out[kSum] = sum;
  out[kRms] = std::sqrt(sum_sq / n);
  out[kSkewness] = flat ? 0.0 : m3 / std::pow(m2, 1.5);
  return out;
}

FeatureMatrix quality_features(const Fragment& fragment) {
  const auto segs = segment10(fragment);
  if (fragment.gradients.size() != fragment.samples.size()) {
    throw Error(ErrorKind::kDimension, "fragment gradients do not cover its samples");
  }
  FeatureMatrix m;
  m.flavor = Flavor::kQuality;
  const std::span<const double> g(fragment.gradients);
  for (std::size_t r = 0; r < kSegments; ++r) {
    const auto row = quality_vector(g.subspan(segs[r].offset, segs[r].length),
                                    fragment.tick_seconds)
                         .as_row();
    std::copy(row.begin(), row.end(), m.values.begin() + static_cast<long>(r * kFeatures));
  }
  return m;
}

FeatureMatrix action_features(const Fragment& fragment) {
  const auto segs = segment10(fragment);
  FeatureMatrix m;
  m.flavor = Flavor::kAction;
  const std::span<const double> x(fragment.samples);
  for (std::size_t r = 0; r < kSegments; ++r) {
    const auto row = strength_statistics(x.subspan(segs[r].offset, segs[r].length));
    std::copy(row.begin(), row.end(), m.values.begin() + static_cast<long>(r * kFeatures));
  }
  return m;
}

FeatureMatrix extract_features(const Fragment& fragment, Flavor flavor) {
  return flavor == Flavor::kQuality ? quality_features(fragment)
                                    : action_features(fragment);
}

double motion_distance(const Fragment& fragment, double noise_scale) {
  const auto& x = fragment.samples;
  if (x.size() < 2) throw Error(ErrorKind::kDimension, "fragment too short");
  const double sa = x.front();
  const double se = x.back();
  const double last = static_cast<double>(x.size() - 1);
  double worst = 0.0;
  std::size_t turn = 0;
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    const double chord = sa + (se - sa) * static_cast<double>(i) / last;
    const double dev = std::abs(x[i] - chord);
    if (dev > worst) {
      worst = dev;
      turn = i;
    }
  }
  if (turn != 0 && worst > 3.0 * noise_scale) {
    const double sm = x[turn];
    return std::abs(sa - sm) + std::abs(sm - se);
  }
  return std::abs(sa - se);
}

double motion_distance(const Fragment& fragment) {
  return motion_distance(fragment, noise_scale(fragment.samples));
}

NormalizationStats NormalizationStats::identity(Flavor flavor) {
  NormalizationStats s;
  s.flavor = flavor;
  s.scale.fill(1.0);
  return s;
}

NormalizationStats fit_normalization(std::span<const FeatureMatrix> matrices) {
  if (matrices.empty()) {
    throw Error(ErrorKind::kParameter, "normalization needs at least one matrix");
  }
  NormalizationStats s;
  s.flavor = matrices.front().flavor;
  const double count = static_cast<double>(matrices.size() * kSegments);
  for (const FeatureMatrix& m : matrices) {
    if (m.flavor != s.flavor) {
      throw Error(ErrorKind::kParameter, "mixed flavors in normalization fit");
    }
    for (std::size_t r = 0; r < kSegments; ++r) {
      for (std::size_t c = 0; c < kFeatures; ++c) s.shift[c] += m.at(r, c);
    }
  }
  for (double& v : s.shift) v /= count;
  std::array<double, kFeatures> var{};
  for (const FeatureMatrix& m : matrices) {
    for (std::size_t r = 0; r < kSegments; ++r) {
      for (std::size_t c = 0; c < kFeatures; ++c) {
        const double d = m.at(r, c) - s.shift[c];
        var[c] += d * d;
      }
    }
  }
  for (std::size_t c = 0; c < kFeatures; ++c) {
    const double sd = std::sqrt(var[c] / count);
    s.scale[c] = sd > 1e-12 * std::max(1.0, std::abs(s.shift[c])) ? sd : 1.0;
  }
  return s;
}

FeatureMatrix normalize(const FeatureMatrix& matrix, const NormalizationStats& stats) {
  if (matrix.flavor != stats.flavor) {
    throw Error(ErrorKind::kParameter, "normalization stats fitted on another flavor");
  }
  FeatureMatrix out = matrix;
  for (std::size_t r = 0; r < kSegments; ++r) {
    for (std::size_t c = 0; c < kFeatures; ++c) {
      out.at(r, c) = (matrix.at(r, c) - stats.shift[c]) / stats.scale[c];
    }
  }
  out.normalized = true;
  return out;
}

std::vector<double> select_columns(const FeatureMatrix& matrix,
                                   std::span<const std::size_t> columns) {
  std::vector<double> out;
  out.reserve(kSegments * columns.size());
  for (std::size_t r = 0; r < kSegments; ++r) {
    for (std::size_t c : columns) {
      if (c >= kFeatures) throw Error(ErrorKind::kDimension, "column out of range");
      out.push_back(matrix.at(r, c));
    }
  }
  return out;
}

}  // namespace wiq
