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

#include "wiq/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "wiq/error.hpp"

namespace wiq {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo =
      *std::max_element(v.begin(), v.begin() + static_cast<long>(mid));
  return 0.5 * (lo + hi);
}

double shrink(double x, double t, ThresholdRule rule) {
  if (rule == ThresholdRule::kHard) return std::abs(x) > t ? x : 0.0;
  const double mag = std::abs(x) - t;
  return mag > 0.0 ? std::copysign(mag, x) : 0.0;
}

}  // namespace

void WaveletConfig::validate(std::size_t trace_length) const {
  if (decomposition_levels < 1) {
    throw Error(ErrorKind::kConfig, "decomposition_levels must be >= 1");
  }
  if (decomposition_levels >= 63 ||
      (std::size_t{1} << decomposition_levels) > trace_length) {
    throw Error(ErrorKind::kConfig,
                "trace of length " + std::to_string(trace_length) +
                    " is too short for " +
                    std::to_string(decomposition_levels) + " levels");
  }
  if (!(threshold_scale > 0.0) || !std::isfinite(threshold_scale)) {
    throw Error(ErrorKind::kConfig, "threshold_scale must be positive");
  }
}

RssTrace denoise(const RssTrace& trace, const WaveletConfig& cfg) {
  trace.validate();
  cfg.validate(trace.size());
  const WaveletFilters f = wavelet_filters(cfg.family);
  WaveletDecomposition dec = wavedec(trace.samples, f, cfg.decomposition_levels);

  const auto& d1 = dec.details.front();
  std::vector<double> finest(d1.size());
  std::transform(d1.begin(), d1.end(), finest.begin(), [](double d) { return std::abs(d); });
  double sigma = median(std::move(finest)) / 0.6745;
  // A median at round-off level means more than half the finest details
  // vanish, as on a noiseless trace with sparse impulses. Fall back to their
  // RMS.
  double peak = 0.0;
  for (double v : trace.samples) peak = std::max(peak, std::abs(v));
  if (sigma <= 1e-12 * std::max(1.0, peak)) {
    double ss = 0.0;
    for (double d : d1) ss += d * d;
    sigma = std::sqrt(ss / static_cast<double>(d1.size()));
  }
  const double n = static_cast<double>(trace.size());
  const double threshold =
      cfg.threshold_scale * sigma * std::sqrt(2.0 * std::log(n));

  for (auto& level : dec.details) {
    for (double& d : level) d = shrink(d, threshold, cfg.threshold_rule);
  }

  RssTrace out = trace;
  out.samples = waverec(dec, f);
  return out;
}

GradientSequence gradient(std::span<const double> samples, double tick_seconds) {
  if (samples.size() < 2) {
    throw Error(ErrorKind::kDimension, "gradient needs at least 2 samples");
  }
  GradientSequence gs;
  gs.tick_seconds = tick_seconds;
  gs.values.resize(samples.size() - 1);
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    gs.values[i] = samples[i + 1] - samples[i];
  }
  return gs;
}

GradientSequence gradient(const RssTrace& trace) {
  return gradient(trace.samples, trace.tick_seconds);
}

double adaptive_delta(std::span<const double> history_db, double percentile,
                      double delta_floor) {
  if (history_db.empty()) {
    throw Error(ErrorKind::kParameter, "adaptive delta needs a non-empty window");
  }
  if (!(percentile > 0.0 && percentile <= 1.0)) {
    throw Error(ErrorKind::kParameter, "percentile must be in (0,1]");
  }
  if (!(delta_floor > 0.0)) {
    throw Error(ErrorKind::kParameter, "delta floor must be positive");
  }
  const double min_db = *std::min_element(history_db.begin(), history_db.end());
  std::vector<double> ratios(history_db.size());
  for (std::size_t i = 0; i < history_db.size(); ++i) {
    ratios[i] = std::pow(10.0, (history_db[i] - min_db) / 10.0);
  }
  std::sort(ratios.begin(), ratios.end());
  const auto n = static_cast<double>(ratios.size());
  // Smallest order statistic with at least `percentile` of values <= it. The
  // epsilon keeps 0.9 * 100 from rounding up to 91.
  const auto rank = static_cast<std::size_t>(std::ceil(percentile * n - 1e-9));
  const double x = ratios[std::clamp<std::size_t>(rank, 1, ratios.size()) - 1];
  return delta_floor * x;
}

double noise_scale(std::span<const double> samples) {
  if (samples.size() < 2) return 0.0;
  std::vector<double> d(samples.size() - 1);
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    d[i] = std::abs(samples[i + 1] - samples[i]);
  }
  return median(std::move(d)) / 0.6745 / std::sqrt(2.0);
}

}  // namespace wiq
