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

#include <cstddef>
#include <span>
#include <vector>

#include "wiq/signal_sim.hpp"
#include "wiq/wavelet.hpp"

namespace wiq {

enum class ThresholdRule { kSoft, kHard };

struct WaveletConfig {
  WaveletFamily family = WaveletFamily::kDb2;
  int decomposition_levels = 4;
  ThresholdRule threshold_rule = ThresholdRule::kSoft;
  // Multiplies the universal threshold sigma * sqrt(2 ln n).
  double threshold_scale = 1.0;

  // Throws kConfig unless 1 <= levels <= log2(length) and scale > 0.
  void validate(std::size_t trace_length) const;
};

// Per-tick first difference of a trace, in dB per tick.
struct GradientSequence {
  std::vector<double> values;
  double tick_seconds = kDefaultTickSeconds;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

// Wavelet shrinkage: decompose, threshold every detail level with the
// universal threshold (noise sigma from the finest level's MAD), rebuild.
RssTrace denoise(const RssTrace& trace, const WaveletConfig& cfg = {});

GradientSequence gradient(const RssTrace& trace);
GradientSequence gradient(std::span<const double> samples, double tick_seconds);

// Near-zero gradient threshold from a window of recent strengths (dB).
// Strengths are mapped to the linear power domain, each sample's ratio to the
// window minimum is taken, and x is the smallest ratio that at least
// `percentile` of the ratios do not exceed. The threshold is
// delta_floor * x, so a perfectly steady window returns the floor.
double adaptive_delta(std::span<const double> history_db,
                      double percentile = 0.9, double delta_floor = 0.5);

// Robust white-noise sigma estimate from first differences
// (MAD / 0.6745 / sqrt 2).
double noise_scale(std::span<const double> samples);

}  // namespace wiq
