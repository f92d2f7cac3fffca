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

#include <benchmark/benchmark.h>

#include <random>

#include "wiq/boundary.hpp"
#include "wiq/features.hpp"
#include "wiq/fusion.hpp"
#include "wiq/learn.hpp"
#include "wiq/network.hpp"
#include "wiq/preprocess.hpp"
#include "wiq/signal_sim.hpp"

namespace {

wiq::RssTrace noisy_trace(int ticks) {
  wiq::ActionScript s;
  wiq::ScriptEntry e;
  e.action = wiq::Action::kTP;
  e.start_tick = 80;
  e.extent = 0.9;
  s.entries = {e};
  const auto clean = wiq::trajectory_to_rss(
      wiq::synth_trajectory(s, wiq::kDefaultTickSeconds, ticks), wiq::ChannelModel{});
  return wiq::add_noise(clean, 9.0, 1);
}

wiq::FeatureMatrix random_matrix() {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  wiq::FeatureMatrix m;
  for (double& v : m.values) v = n(rng);
  return m;
}

void BM_Denoise(benchmark::State& state) {
  const auto t = noisy_trace(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(wiq::denoise(t));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Denoise)->Arg(400)->Arg(4000);

void BM_DetectBoundaries(benchmark::State& state) {
  const auto gs = wiq::gradient(wiq::denoise(noisy_trace(static_cast<int>(state.range(0)))));
  for (auto _ : state) benchmark::DoNotOptimize(wiq::detect_boundaries(gs, wiq::BoundaryParams{}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DetectBoundaries)->Arg(400)->Arg(4000);

void BM_ActionFeatures(benchmark::State& state) {
  const auto t = noisy_trace(400);
  const auto f = wiq::make_fragment(t, wiq::gradient(t), {80, 200});
  for (auto _ : state) benchmark::DoNotOptimize(wiq::action_features(f));
}
BENCHMARK(BM_ActionFeatures);

void BM_Forward(benchmark::State& state) {
  const auto net = wiq::NetworkParams::random(6, wiq::kDefaultHidden, 1);
  const auto x = random_matrix();
  for (auto _ : state) {
    benchmark::DoNotOptimize(wiq::nmlp_classify(wiq::cnn_forward(x, net.cnn), net.nmlp));
  }
}
BENCHMARK(BM_Forward);

void BM_Backprop(benchmark::State& state) {
  const auto net = wiq::NetworkParams::random(6, wiq::kDefaultHidden, 1);
  auto grad = net.zeros_like();
  const auto x = random_matrix();
  for (auto _ : state) benchmark::DoNotOptimize(wiq::loss_and_gradient(net, x, 2, grad));
}
BENCHMARK(BM_Backprop);

void BM_Fuse(benchmark::State& state) {
  wiq::ActivityRecord r;
  for (int i = 0; i < state.range(0); ++i) {
    r.actions.push_back(wiq::ActionResult::from(wiq::ClassDistribution::uniform(wiq::kActionCount),
                                                wiq::ClassDistribution::uniform(15)));
  }
  for (auto _ : state) benchmark::DoNotOptimize(wiq::fuse(r));
}
BENCHMARK(BM_Fuse)->Arg(4)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
