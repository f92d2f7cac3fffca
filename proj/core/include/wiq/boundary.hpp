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

#include <functional>
#include <span>
#include <vector>

#include "wiq/preprocess.hpp"
#include "wiq/signal_sim.hpp"
#include "wiq/types.hpp"

namespace wiq {

struct BoundaryParams {
  int window = 5;      // L: samples averaged on each side of the scan point
  int step = 2;        // scan stride
  double alpha = 5.0;  // ratio between the moving and the quiet side
  double delta = 0.5;  // |average gradient| counted as "near zero"

  void validate() const;
  // Setting used when the channel is poor.
  static BoundaryParams low_snr() { return BoundaryParams{5, 2, 5.0, 0.8}; }
};

enum class BoundaryKind { kStart, kEnd };

struct BoundaryPoint {
  int index = 0;
  BoundaryKind kind = BoundaryKind::kStart;

  bool operator==(const BoundaryPoint&) const = default;
};

struct FragmentBounds {
  int start = 0;  // inclusive sample indices
  int end = 0;

  int sample_count() const { return end - start + 1; }
  bool operator==(const FragmentBounds&) const = default;
};

// One action's slice of a trace. `gradients[i]` is the forward difference at
// sample start+i (the last trace sample reuses the final difference).
struct Fragment {
  int start_index = 0;
  int end_index = 0;
  double tick_seconds = kDefaultTickSeconds;
  std::vector<double> samples;
  std::vector<double> gradients;
  double b1 = 0.0;   // gradient at the start point
  double b2 = 0.0;   // gradient at the end point
  double s_a = 0.0;  // strength at the start point
  double s_e = 0.0;  // strength at the end point

  int sample_count() const { return end_index - start_index + 1; }
  FragmentBounds bounds() const { return {start_index, end_index}; }
};

// Boundary scan: for y = L, L+Step, ... while the post window fits,
// a_r averages GS[y-L..y-1] and a_o averages GS[y+1..y+L]. A start is
// emitted when |a_o| > alpha|a_r| and |a_r| <= delta; an end when
// |a_r| > alpha|a_o| and |a_o| <= delta. Throws kInputTooShort if G <= 2L.
std::vector<BoundaryPoint> detect_boundaries(const GradientSequence& gs,
                                             const BoundaryParams& p);

struct AdaptiveDeltaConfig {
  int window_ticks = 300;  // ~1.5 s of history at 200 Hz
  double percentile = 0.9;
  double delta_floor = 0.5;
};

// Same scan, with delta re-estimated from the strengths preceding each scan
// point. The estimate is frozen once a start is found and resumes after the
// next end. `strengths` are the samples the gradient was taken from.
std::vector<BoundaryPoint> detect_boundaries_adaptive(
    const GradientSequence& gs, std::span<const double> strengths,
    const BoundaryParams& p, const AdaptiveDeltaConfig& cfg = {});

Fragment make_fragment(const RssTrace& trace, const GradientSequence& gs,
                       FragmentBounds bounds);
std::vector<Fragment> fragment_trace(const RssTrace& trace,
                                     std::span<const FragmentBounds> bounds);

struct ActionScore {
  Action action = Action::kCP;
  double probability = 0.0;
};
using ActionScorer = std::function<ActionScore(const Fragment&)>;

// Start/end pairings eligible as fragments: a start candidate followed by a
// later end candidate spanning at least `min_samples` samples.
struct CandidatePair {
  std::size_t start_pos = 0;  // positions in the candidate list
  std::size_t end_pos = 0;
  FragmentBounds bounds;
};
std::vector<CandidatePair> admissible_pairs(
    std::span<const BoundaryPoint> candidates, int min_samples);

struct PruneResult {
  std::vector<Fragment> fragments;
  std::vector<ActionScore> scores;
  double objective = 0.0;  // mean probability of the chosen fragments
};

// Chooses the ordered, non-overlapping start/end pairing that maximizes the
// mean recognition probability of its fragments. Ties go to more fragments,
// then to lexicographically earlier starts (then ends). Fragments shorter
// than 2L samples are not admissible. No feasible pairing gives an empty
// result.
PruneResult prune_boundaries(std::span<const BoundaryPoint> candidates,
                             const RssTrace& trace, const ActionScorer& scorer,
                             const BoundaryParams& p);

// gradient -> detect -> prune on an already denoised trace.
PruneResult segment_trace(const RssTrace& denoised, const BoundaryParams& p,
                          const ActionScorer& scorer);

}  // namespace wiq
