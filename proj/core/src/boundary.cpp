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

#include "wiq/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "wiq/error.hpp"

namespace wiq {

void BoundaryParams::validate() const {
  if (window < 1) throw Error(ErrorKind::kParameter, "L must be >= 1");
  if (step < 1) throw Error(ErrorKind::kParameter, "Step must be >= 1");
  if (!(alpha > 1.0)) throw Error(ErrorKind::kParameter, "alpha must be > 1");
  if (!(delta > 0.0)) throw Error(ErrorKind::kParameter, "delta must be > 0");
}

namespace {

struct WindowMeans {
  double pre = 0.0;
  double post = 0.0;
};

WindowMeans window_means(const GradientSequence& gs, int y, int L) {
  WindowMeans m;
  for (int i = y - L; i <= y - 1; ++i) m.pre += gs.values[static_cast<std::size_t>(i)];
  for (int i = y + 1; i <= y + L; ++i) m.post += gs.values[static_cast<std::size_t>(i)];
  m.pre /= L;
  m.post /= L;
  return m;
}

void check_scan_input(const GradientSequence& gs, const BoundaryParams& p) {
  p.validate();
  if (static_cast<long>(gs.size()) <= 2L * p.window) {
    throw Error(ErrorKind::kInputTooShort,
                "gradient sequence of length " + std::to_string(gs.size()) +
                    " needs more than 2L = " + std::to_string(2 * p.window) +
                    " values");
  }
}

// The post window GS[y+1..y+L] must fit, so the last scanned point is
// G-1-L.
int last_scan_point(const GradientSequence& gs, const BoundaryParams& p) {
  return static_cast<int>(gs.size()) - 1 - p.window;
}

}  // namespace

std::vector<BoundaryPoint> detect_boundaries(const GradientSequence& gs,
                                             const BoundaryParams& p) {
  check_scan_input(gs, p);
  std::vector<BoundaryPoint> out;
  const int last = last_scan_point(gs, p);
  for (int y = p.window; y <= last; y += p.step) {
    const WindowMeans m = window_means(gs, y, p.window);
    const double ar = std::abs(m.pre);
    const double ao = std::abs(m.post);
    if (ao > p.alpha * ar && ar <= p.delta) {
      out.push_back({y, BoundaryKind::kStart});
    }
    if (ar > p.alpha * ao && ao <= p.delta) {
      out.push_back({y, BoundaryKind::kEnd});
    }
  }
  return out;
}

std::vector<BoundaryPoint> detect_boundaries_adaptive(
    const GradientSequence& gs, std::span<const double> strengths,
    const BoundaryParams& p, const AdaptiveDeltaConfig& cfg) {
  check_scan_input(gs, p);
  if (strengths.size() != gs.size() + 1) {
    throw Error(ErrorKind::kDimension,
                "strengths must be one longer than the gradient sequence");
  }
  if (cfg.window_ticks < 1) {
    throw Error(ErrorKind::kParameter, "adaptive window must be >= 1 tick");
  }
  std::vector<BoundaryPoint> out;
  const int last = last_scan_point(gs, p);
  bool tracking = true;
  double delta = p.delta;
  for (int y = p.window; y <= last; y += p.step) {
    if (tracking) {
      const int lo = std::max(0, y - cfg.window_ticks);
      delta = adaptive_delta(strengths.subspan(static_cast<std::size_t>(lo),
                                               static_cast<std::size_t>(y - lo)),
                             cfg.percentile, cfg.delta_floor);
    }
    const WindowMeans m = window_means(gs, y, p.window);
    const double ar = std::abs(m.pre);
    const double ao = std::abs(m.post);
    if (ao > p.alpha * ar && ar <= delta) {
      out.push_back({y, BoundaryKind::kStart});
      tracking = false;
    }
    if (ar > p.alpha * ao && ao <= delta) {
      out.push_back({y, BoundaryKind::kEnd});
      tracking = true;
    }
  }
  return out;
}

Fragment make_fragment(const RssTrace& trace, const GradientSequence& gs,
                       FragmentBounds bounds) {
  const int n = static_cast<int>(trace.size());
  if (bounds.start < 0 || bounds.end >= n || bounds.start >= bounds.end) {
    throw Error(ErrorKind::kDimension,
                "fragment [" + std::to_string(bounds.start) + ", " +
                    std::to_string(bounds.end) + "] outside trace of length " +
                    std::to_string(n));
  }
  if (gs.size() + 1 != trace.size()) {
    throw Error(ErrorKind::kDimension, "gradient does not match trace");
  }
  Fragment f;
  f.start_index = bounds.start;
  f.end_index = bounds.end;
  f.tick_seconds = trace.tick_seconds;
  f.samples.assign(trace.samples.begin() + bounds.start,
                   trace.samples.begin() + bounds.end + 1);
  const int last_grad = static_cast<int>(gs.size()) - 1;
  f.gradients.reserve(f.samples.size());
  for (int i = bounds.start; i <= bounds.end; ++i) {
    f.gradients.push_back(gs.values[static_cast<std::size_t>(std::min(i, last_grad))]);
  }
  f.b1 = f.gradients.front();
  f.b2 = f.gradients.back();
  f.s_a = f.samples.front();
  f.s_e = f.samples.back();
  return f;
}

std::vector<Fragment> fragment_trace(const RssTrace& trace,
                                     std::span<const FragmentBounds> bounds) {
  const GradientSequence gs = gradient(trace);
  std::vector<Fragment> out;
  out.reserve(bounds.size());
  for (const FragmentBounds& b : bounds) out.push_back(make_fragment(trace, gs, b));
  return out;
}

std::vector<CandidatePair> admissible_pairs(
    std::span<const BoundaryPoint> candidates, int min_samples) {
  std::vector<CandidatePair> pairs;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].kind != BoundaryKind::kStart) continue;
    for (std::size_t j = i + 1; j < candidates.size(); ++j) {
      if (candidates[j].kind != BoundaryKind::kEnd) continue;
      const FragmentBounds b{candidates[i].index, candidates[j].index};
      if (b.end > b.start && b.sample_count() >= min_samples) {
        pairs.push_back({i, j, b});
      }
    }
  }
  return pairs;
}

namespace {

struct Selection {
  double sum = 0.0;
  std::vector<std::size_t> pairs;  // left to right
};

// Same fragment count: larger sum, then earlier starts, then earlier ends.
bool better(const Selection& a, const Selection& b,
            const std::vector<CandidatePair>& pairs) {
  if (a.sum != b.sum) return a.sum > b.sum;
  const std::size_t n = std::min(a.pairs.size(), b.pairs.size());
  for (std::size_t i = 0; i < n; ++i) {
    const int sa = pairs[a.pairs[i]].bounds.start;
    const int sb = pairs[b.pairs[i]].bounds.start;
    if (sa != sb) return sa < sb;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const int ea = pairs[a.pairs[i]].bounds.end;
    const int eb = pairs[b.pairs[i]].bounds.end;
    if (ea != eb) return ea < eb;
  }
  return false;
}

}  // namespace

PruneResult prune_boundaries(std::span<const BoundaryPoint> candidates,
                             const RssTrace& trace, const ActionScorer& scorer,
                             const BoundaryParams& p) {
  p.validate();
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (candidates[i].index < candidates[i - 1].index) {
      throw Error(ErrorKind::kParameter, "candidates must be sorted by index");
    }
  }
  const std::vector<CandidatePair> pairs =
      admissible_pairs(candidates, 2 * p.window);
  if (pairs.empty()) return {};

  const GradientSequence gs = gradient(trace);
  std::vector<Fragment> fragments;
  std::vector<ActionScore> scores;
  fragments.reserve(pairs.size());
  scores.reserve(pairs.size());
  for (const CandidatePair& c : pairs) {
    fragments.push_back(make_fragment(trace, gs, c.bounds));
    const ActionScore s = scorer(fragments.back());
    if (!(s.probability >= 0.0 && s.probability <= 1.0)) {
      throw Error(ErrorKind::kParameter, "scorer returned a probability outside [0,1]");
    }
    scores.push_back(s);
  }

  // First candidate position strictly after each end point's sample index.
  const std::size_t k_count = candidates.size();
  std::vector<std::size_t> after(k_count, k_count);
  for (std::size_t j = 0; j < k_count; ++j) {
    std::size_t q = j + 1;
    while (q < k_count && candidates[q].index <= candidates[j].index) ++q;
    after[j] = q;
  }
  std::vector<std::vector<std::size_t>> starting_at(k_count);
  for (std::size_t f = 0; f < pairs.size(); ++f) {
    starting_at[pairs[f].start_pos].push_back(f);
  }

  // best[u][k]: best selection of exactly u fragments whose starts lie at
  // candidate positions >= k.
  using Row = std::vector<std::optional<Selection>>;
  std::vector<Row> best;
  best.emplace_back(k_count + 1, Selection{});
  for (std::size_t u = 1;; ++u) {
    Row row(k_count + 1);
    for (std::size_t k = k_count; k-- > 0;) {
      std::optional<Selection> cand = row[k + 1];
      for (std::size_t f : starting_at[k]) {
        const auto& rest = best[u - 1][after[pairs[f].end_pos]];
        if (!rest) continue;
        Selection s;
        s.sum = scores[f].probability + rest->sum;
        s.pairs.reserve(rest->pairs.size() + 1);
        s.pairs.push_back(f);
        s.pairs.insert(s.pairs.end(), rest->pairs.begin(), rest->pairs.end());
        if (!cand || better(s, *cand, pairs)) cand = std::move(s);
      }
      row[k] = std::move(cand);
    }
    if (!row[0]) break;
    best.push_back(std::move(row));
  }

  const Selection* winner = nullptr;
  double winner_mean = -1.0;
  for (std::size_t u = 1; u < best.size(); ++u) {
    const Selection& s = *best[u][0];
    double sum = 0.0;
    for (std::size_t f : s.pairs) sum += scores[f].probability;
    const double mean = sum / static_cast<double>(u);
    // >= lets a larger U win a tie on the mean
    if (mean >= winner_mean) {
      winner_mean = mean;
      winner = &s;
    }
  }

  PruneResult result;
  result.objective = winner_mean;
  for (std::size_t f : winner->pairs) {
    result.fragments.push_back(std::move(fragments[f]));
    result.scores.push_back(scores[f]);
  }
  return result;
}

PruneResult segment_trace(const RssTrace& denoised, const BoundaryParams& p,
                          const ActionScorer& scorer) {
  const GradientSequence gs = gradient(denoised);
  const auto candidates = detect_boundaries(gs, p);
  return prune_boundaries(candidates, denoised, scorer, p);
}

}  // namespace wiq
