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
#include <functional>
#include <vector>

#include "wiq/boundary.hpp"
#include "wiq/preprocess.hpp"

namespace wiq::testing {

// Probabilities on a 1/64 grid keep every sum exact, so ties are real ties.
inline ActionScorer grid_scorer(std::uint64_t seed) {
  return [seed](const Fragment& f) {
    std::uint64_t h = seed ^ (static_cast<std::uint64_t>(f.start_index) * 0x9e3779b97f4a7c15ULL) ^
                      (static_cast<std::uint64_t>(f.end_index) * 0xc2b2ae3d27d4eb4fULL);
    h ^= h >> 29;
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 32;
    return ActionScore{kAllActions[h % 6], static_cast<double>((h >> 8) % 65) / 64.0};
  };
}

struct Chosen {
  double mean = -1.0;
  std::vector<FragmentBounds> bounds;
};

inline bool oracle_better(const Chosen& a, const Chosen& b) {
  if (a.mean != b.mean) return a.mean > b.mean;
  if (a.bounds.size() != b.bounds.size()) return a.bounds.size() > b.bounds.size();
  for (std::size_t i = 0; i < a.bounds.size(); ++i) {
    if (a.bounds[i].start != b.bounds[i].start) return a.bounds[i].start < b.bounds[i].start;
  }
  for (std::size_t i = 0; i < a.bounds.size(); ++i) {
    if (a.bounds[i].end != b.bounds[i].end) return a.bounds[i].end < b.bounds[i].end;
  }
  return false;
}

// Enumerates every ordered chain of admissible pairs in which each start
// lies after the previous end.
inline Chosen exhaustive(const std::vector<BoundaryPoint>& c, const RssTrace& t,
                  const ActionScorer& scorer, int min_samples) {
  struct P {
    FragmentBounds b;
    double prob;
  };
  const auto gs = gradient(t);
  std::vector<P> pairs;
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      if (c[i].kind != BoundaryKind::kStart || c[j].kind != BoundaryKind::kEnd) continue;
      const FragmentBounds b{c[i].index, c[j].index};
      if (b.end <= b.start || b.sample_count() < min_samples) continue;
      pairs.push_back({b, scorer(make_fragment(t, gs, b)).probability});
    }
  }
  Chosen best;
  std::vector<std::size_t> chain;
  std::function<void(int)> walk = [&](int last_end) {
    if (!chain.empty()) {
      Chosen cand;
      double sum = 0.0;
      for (std::size_t k : chain) {
        sum += pairs[k].prob;
        cand.bounds.push_back(pairs[k].b);
      }
      cand.mean = sum / static_cast<double>(chain.size());
      if (best.bounds.empty() || oracle_better(cand, best)) best = cand;
    }
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      if (pairs[k].b.start <= last_end) continue;
      if (!chain.empty() && pairs[k].b.start < pairs[chain.back()].b.start) continue;
      chain.push_back(k);
      walk(pairs[k].b.end);
      chain.pop_back();
    }
  };
  walk(-1);
  return best;
}

}  // namespace wiq::testing
