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

#include "wiq/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "wiq/boundary.hpp"
#include "wiq/error.hpp"
#include "wiq/features.hpp"
#include "wiq/fusion.hpp"
#include "wiq/io.hpp"
#include "wiq/preprocess.hpp"
#include "wiq/recognizer.hpp"

namespace wiq {
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr std::array<Activity, 5> kDrivingActivities = {
    Activity::kGroundStart, Activity::kParking, Activity::kHillStart,
    Activity::kAcceleration, Activity::kDeceleration};

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0) {
  return splitmix(splitmix(splitmix(a) ^ b) ^ c);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double normal(std::mt19937_64& rng, double mean, double sd) {
  return sd > 0.0 ? std::normal_distribution<double>(mean, sd)(rng) : mean;
}

template <class F>
decltype(auto) stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e.what());
  }
}

// Accumulates wall-clock seconds per stage in first-use order.
class StageClock {
 public:
  template <class F>
  decltype(auto) run(const char* name, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    struct Add {
      StageClock* self;
      const char* name;
      std::chrono::steady_clock::time_point t0;
      ~Add() {
        const double dt =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        self->add(name, dt);
      }
    } add{this, name, t0};
    return stage(name, std::forward<F>(f));
  }
  void add(const std::string& name, double seconds) {
    for (auto& [n, s] : entries_) {
      if (n == name) {
        s += seconds;
        return;
      }
    }
    entries_.emplace_back(name, seconds);
  }
  const std::vector<std::pair<std::string, double>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, double>> entries_;
};

// Task whose corpus an experiment draws from.
Task corpus_task(Task t) {
  if (t == Task::kFusionEval) return Task::kDriverId;
  if (t == Task::kAblation) return Task::kBodyStatus;
  return t;
}

// ---- Dataset generation ------------------------------------------------------

LabeledTrace make_action_trace(const ExperimentSpec& spec, int cls, int index) {
  const std::uint64_t id = mix(spec.seed, 0x41 + cls, index);
  std::mt19937_64 rng(id);
  const Action a = kAllActions[cls];
  ActionScript s;
  s.activity = Activity::kFree;
  ScriptEntry e;
  e.action = a;
  e.start_tick = uniform_int(rng, 60, 120);
  e.speed = static_cast<SpeedProfile>(uniform_int(rng, 0, 2));
  e.duration_ticks = profile_duration(e.speed);
  if (is_press(a)) {
    e.extent = uniform(rng, 0.5, 1.0);
  } else {
    s.initial_positions[static_cast<std::size_t>(pedal_of(a))] = uniform(rng, 0.5, 1.0);
    e.extent = 1.0;
  }
  e.jitter = uniform(rng, 0.0, 0.1);
  e.jitter_seed = rng();
  s.entries = {e};
  const int total = e.end_tick() + 1 + uniform_int(rng, 60, 120);
  const auto [lo, hi] = snr_range(spec.snr_band);
  const double snr = uniform(rng, lo, hi);
  LabeledTrace t;
  t.id = id;
  t.label = cls;
  t.script = s;
  t.clean = trajectory_to_rss(synth_trajectory(s, kDefaultTickSeconds, total), ChannelModel{});
  t.noisy = add_noise(t.clean, snr, rng());
  return t;
}

LabeledTrace make_activity_trace(const ExperimentSpec& spec, Task task, int cls, int index) {
  const std::uint64_t id = mix(spec.seed, 0x51 + cls, index);
  std::mt19937_64 rng(id);
  const QualityProfile q = quality_profile(task, cls);
  const Activity activity = kDrivingActivities[static_cast<std::size_t>(index) % 5];
  const ActivityTemplate tpl = activity_template(activity);

  ActionScript s;
  s.activity = activity;
  s.quality_class = cls;
  auto press_depth = [&] { return std::clamp(normal(rng, q.extent, q.extent_spread), 0.3, 1.0); };
  for (std::size_t p = 0; p < kPedalCount; ++p) {
    if (tpl.initially_pressed[p]) s.initial_positions[p] = press_depth();
  }
  int tick = uniform_int(rng, 60, 120);
  for (Action a : tpl.actions) {
    ScriptEntry e;
    e.action = a;
    e.start_tick = tick;
    const double speed = std::max(0.3, normal(rng, q.speed_scale, q.speed_spread));
    e.duration_ticks = std::clamp(
        static_cast<int>(std::lround(kRegularActionTicks / speed)), 15, 150);
    e.extent = is_press(a) ? press_depth() : 1.0;
    e.jitter = uniform(rng, q.jitter_min, q.jitter_max);
    e.jitter_seed = rng();
    s.entries.push_back(e);
    const int gap = std::max(15, static_cast<int>(std::lround(normal(rng, q.gap_ticks, q.gap_spread))));
    tick = e.end_tick() + 1 + gap;
  }
  const int total = s.entries.back().end_tick() + 1 + uniform_int(rng, 60, 120);
  const auto [lo, hi] = snr_range(spec.snr_band);
  const double snr = uniform(rng, lo, hi);
  LabeledTrace t;
  t.id = id;
  t.label = cls;
  t.script = s;
  t.clean = trajectory_to_rss(synth_trajectory(s, kDefaultTickSeconds, total), ChannelModel{});
  t.noisy = add_noise(t.clean, snr, rng());
  return t;
}

// ---- Pipeline pieces -------------------------------------------------------------

struct Prepared {
  RssTrace denoised;
  GradientSequence gs;
};

Prepared prepare(const RssTrace& noisy) {
  Prepared p;
  p.denoised = denoise(noisy);
  p.gs = gradient(p.denoised);
  return p;
}

BoundaryParams boundary_params(SnrBand band) {
  return band == SnrBand::kLow ? BoundaryParams::low_snr() : BoundaryParams{};
}

Fragment truth_fragment(const Prepared& p, const GroundTruth& g) {
  return make_fragment(p.denoised, p.gs, {g.start, g.end});
}

Fragment whole_fragment(const Prepared& p) {
  return make_fragment(p.denoised, p.gs, {0, static_cast<int>(p.denoised.size()) - 1});
}

double overlap_ratio(FragmentBounds a, FragmentBounds b) {
  const int inter = std::min(a.end, b.end) - std::max(a.start, b.start) + 1;
  if (inter <= 0) return 0.0;
  const int uni = std::max(a.end, b.end) - std::min(a.start, b.start) + 1;
  return static_cast<double>(inter) / uni;
}

Evaluation evaluate(std::string name, std::span<const ClassDistribution> dists,
                    std::span<const int> truths, const std::vector<std::string>& labels) {
  std::vector<int> pred;
  pred.reserve(dists.size());
  for (const auto& d : dists) pred.push_back(static_cast<int>(d.argmax()));
  Evaluation e;
  e.name = std::move(name);
  e.confusion = confusion(pred, truths, labels);
  e.accuracy = accuracy(pred, truths);
  e.rank_k.assign(labels.size(), 0.0);
  for (std::size_t i = 0; i < dists.size(); ++i) {
    for (std::size_t k = 1; k <= labels.size(); ++k) {
      if (rank_k(dists[i], static_cast<std::size_t>(truths[i]), k)) e.rank_k[k - 1] += 1.0;
    }
  }
  if (!dists.empty()) {
    for (double& r : e.rank_k) r /= static_cast<double>(dists.size());
  }
  return e;
}

std::vector<std::string> iteration_columns(const std::vector<int>& grid) {
  std::vector<std::string> c;
  for (int g : grid) c.push_back(std::to_string(g));
  return c;
}

// ---- Action recognition -------------------------------------------------------

// Candidate pairs overlapping the true action at least this much (intersection
// over union) become extra positives; those below kIdleOverlap become idle.
constexpr double kPositiveOverlap = 0.7;
constexpr double kIdleOverlap = 0.3;
constexpr std::size_t kPositivesPerTrace = 2;
constexpr std::size_t kIdlePerTrace = 3;

void run_action_task(const ExperimentSpec& spec, const Corpus& corpus, Report& r,
                     StageClock& clock) {
  const BoundaryParams bp = boundary_params(spec.snr_band);
  std::vector<Prepared> train_prep;
  std::vector<Prepared> test_prep;
  clock.run("denoise", [&] {
    for (const auto& t : corpus.train) train_prep.push_back(prepare(t.noisy));
    for (const auto& t : corpus.test) test_prep.push_back(prepare(t.noisy));
    return 0;
  });

  // Training fragments: ground truth, plus candidate pairs from boundary
  // detection that either match an action closely (extra positives) or
  // miss it (idle).
  std::vector<Fragment> frags;
  std::vector<int> labels;
  std::vector<LabeledMatrix> baseline_raw;
  std::size_t idle_count = 0;
  clock.run("segment", [&] {
    for (std::size_t i = 0; i < corpus.train.size(); ++i) {
      const auto& t = corpus.train[i];
      const Prepared& p = train_prep[i];
      const GroundTruth& g = t.clean.ground_truth.front();
      frags.push_back(truth_fragment(p, g));
      labels.push_back(t.label);
      baseline_raw.push_back({action_features(frags.back()), t.label});

      const auto cands = detect_boundaries(p.gs, bp);
      const auto pairs = admissible_pairs(cands, 2 * bp.window);
      std::vector<FragmentBounds> near, idle;
      for (const auto& pr : pairs) {
        const double o = overlap_ratio(pr.bounds, {g.start, g.end});
        if (o >= kPositiveOverlap) {
          near.push_back(pr.bounds);
        } else if (o < kIdleOverlap) {
          idle.push_back(pr.bounds);
        }
      }
      std::mt19937_64 rng(mix(t.id, 0x1d1e));
      auto take = [&](std::vector<FragmentBounds>& from, std::size_t n, int label) {
        for (std::size_t k = 0; k < n && !from.empty(); ++k) {
          const std::size_t j = rng() % from.size();
          frags.push_back(make_fragment(p.denoised, p.gs, from[j]));
          labels.push_back(label);
          if (label != kIdleClass) baseline_raw.push_back({action_features(frags.back()), label});
          from.erase(from.begin() + static_cast<std::ptrdiff_t>(j));
        }
      };
      take(near, kPositivesPerTrace, t.label);
      const std::size_t before = frags.size();
      take(idle, kIdlePerTrace, kIdleClass);
      idle_count += frags.size() - before;
    }
    return 0;
  });

  // CNN with checkpoints along the iteration grid.
  std::map<int, NetworkParams> checkpoints;
  ActionRecognizer recognizer;
  clock.run("train", [&] {
    std::vector<LabeledMatrix> data;
    for (std::size_t i = 0; i < frags.size(); ++i) {
      data.push_back({action_features(frags[i]), labels[i]});
    }
    std::vector<std::string> names = action_labels();
    names.emplace_back(kIdleLabel);
    const std::set<int> grid(spec.iteration_grid.begin(), spec.iteration_grid.end());
    recognizer.model = train(data, names, spec.cnn,
                             [&](int epoch, double, const NetworkParams& p) {
                               if (grid.count(epoch)) checkpoints[epoch] = p;
                             });
    recognizer.validate();
    return 0;
  });

  // Test fragments: boundary detection + pruning with the trained scorer,
  // falling back to the whole trace when no admissible pair exists.
  std::vector<Fragment> test_frags;
  int both_hit = 0;
  int boundary_hit = 0;
  int fallback = 0;
  clock.run("segment", [&] {
    for (std::size_t i = 0; i < corpus.test.size(); ++i) {
      const Prepared& p = test_prep[i];
      const GroundTruth& g = corpus.test[i].clean.ground_truth.front();
      if (!spec.detect_test_boundaries) {
        test_frags.push_back(truth_fragment(p, g));
        continue;
      }
      const PruneResult pr = segment_trace(p.denoised, bp, recognizer.scorer());
      if (pr.fragments.empty()) {
        test_frags.push_back(whole_fragment(p));
        ++fallback;
      } else {
        std::size_t best = 0;
        for (std::size_t k = 1; k < pr.scores.size(); ++k) {
          if (pr.scores[k].probability > pr.scores[best].probability) best = k;
        }
        test_frags.push_back(pr.fragments[best]);
      }
      const auto b = test_frags.back().bounds();
      const bool hs = std::abs(b.start - g.start) <= 5;
      const bool he = std::abs(b.end - g.end) <= 5;
      boundary_hit += hs + he;
      both_hit += hs && he;
    }
    return 0;
  });

  std::vector<int> truths;
  for (const auto& t : corpus.test) truths.push_back(t.label);
  const auto& classes = corpus.classes;
  const std::vector<int>& grid = spec.iteration_grid;
  Table errors{"error_by_iterations", iteration_columns(grid), {}};

  clock.run("classify", [&] {
    std::vector<double> cnn_row;
    for (int g : grid) {
      Model m = recognizer.model;
      m.net = checkpoints.at(g);
      const ActionRecognizer cp{m};
      std::vector<ClassDistribution> d;
      for (const auto& f : test_frags) d.push_back(cp.action_distribution(f));
      Evaluation e = evaluate("cnn_" + std::to_string(g), d, truths, classes);
      cnn_row.push_back(1.0 - e.accuracy);
      if (g == spec.cnn.iterations) {
        e.name = "cnn";
        r.evaluations.push_back(std::move(e));
      }
    }
    errors.rows.emplace_back("cnn", cnn_row);

    // Baselines on flattened matrices of the non-idle training fragments.
    std::vector<FeatureMatrix> raw;
    for (const auto& b : baseline_raw) raw.push_back(b.x);
    const NormalizationStats norm = fit_normalization(raw);
    std::vector<LabeledMatrix> train_norm;
    for (const auto& b : baseline_raw) train_norm.push_back({normalize(b.x, norm), b.label});
    const VectorDataset train_vec = flatten(train_norm, static_cast<int>(classes.size()));
    std::vector<std::vector<double>> test_vec;
    for (const auto& f : test_frags) {
      const FeatureMatrix m = normalize(action_features(f), norm);
      test_vec.emplace_back(m.values.begin(), m.values.end());
    }

    std::vector<double> svm_row;
    for (int g : grid) {
      SvmConfig c = spec.svm;
      c.iterations = g;
      const SvmModel svm = svm_train(train_vec, c);
      std::vector<ClassDistribution> d;
      for (const auto& x : test_vec) d.push_back(svm_classify(svm, x));
      Evaluation e = evaluate("svm_" + std::to_string(g), d, truths, classes);
      svm_row.push_back(1.0 - e.accuracy);
      if (g == spec.svm.iterations) {
        e.name = "svm";
        r.evaluations.push_back(std::move(e));
      }
    }
    errors.rows.emplace_back("svm", svm_row);

    std::vector<ClassDistribution> d;
    for (const auto& x : test_vec) d.push_back(knn_classify(train_vec, x, spec.knn_k));
    Evaluation e = evaluate("knn", d, truths, classes);
    errors.rows.emplace_back("knn", std::vector<double>(grid.size(), 1.0 - e.accuracy));
    r.evaluations.push_back(std::move(e));
    return 0;
  });

  r.tables.push_back(std::move(errors));
  const double n = static_cast<double>(std::max<std::size_t>(1, corpus.test.size()));
  r.scalars.emplace_back("average_accuracy", r.evaluation("cnn").confusion.average_accuracy());
  r.scalars.emplace_back("cnn_error", 1.0 - r.evaluation("cnn").accuracy);
  r.scalars.emplace_back("svm_error", 1.0 - r.evaluation("svm").accuracy);
  r.scalars.emplace_back("knn_error", 1.0 - r.evaluation("knn").accuracy);
  r.scalars.emplace_back("idle_training_fragments", static_cast<double>(idle_count));
  if (spec.detect_test_boundaries) {
    r.scalars.emplace_back("test_boundaries_within_5", boundary_hit / (2.0 * n));
    r.scalars.emplace_back("test_fragments_within_5", both_hit / n);
    r.scalars.emplace_back("test_segmentation_fallbacks", fallback);
  }
}

// ---- Quality recognition ------------------------------------------------------

struct QualityData {
  std::vector<Fragment> frags;
  std::vector<Action> actions;
  std::vector<int> quality;
  std::vector<std::size_t> trace;  // index of the source trace
};

QualityData quality_fragments(const std::vector<LabeledTrace>& traces) {
  QualityData d;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const Prepared p = prepare(traces[i].noisy);
    for (const auto& g : traces[i].clean.ground_truth) {
      d.frags.push_back(truth_fragment(p, g));
      d.actions.push_back(g.action);
      d.quality.push_back(traces[i].label);
      d.trace.push_back(i);
    }
  }
  return d;
}

struct QualityOutcome {
  std::vector<ClassDistribution> single;
  std::vector<int> single_truth;
  std::vector<ClassDistribution> fused;
  std::vector<int> fused_truth;
  std::vector<ClassDistribution> action;
  std::vector<int> action_truth;
};

QualityOutcome run_quality_pipeline(const ExperimentSpec& spec, const Corpus& corpus,
                                    StageClock& clock) {
  QualityData train_d, test_d;
  clock.run("segment", [&] {
    train_d = quality_fragments(corpus.train);
    test_d = quality_fragments(corpus.test);
    return 0;
  });
  ActionRecognizer actions;
  QualityRecognizer quality;
  clock.run("train", [&] {
    std::vector<int> act;
    for (Action a : train_d.actions) act.push_back(static_cast<int>(a));
    TrainConfig c = spec.cnn;
    actions = train_action_recognizer(train_d.frags, act, false, c);
    c.seed = spec.cnn.seed + 17;
    quality = train_quality_recognizer(train_d.frags, train_d.actions, train_d.quality,
                                       corpus.classes, c);
    return 0;
  });
  QualityOutcome o;
  clock.run("classify", [&] {
    ActivityRecord record;
    for (std::size_t i = 0; i < test_d.frags.size(); ++i) {
      ActionResult res = recognize_action(test_d.frags[i], actions, quality);
      o.action.push_back(res.action_dist);
      o.action_truth.push_back(static_cast<int>(test_d.actions[i]));
      o.single.push_back(res.quality_dist);
      o.single_truth.push_back(test_d.quality[i]);
      record.actions.push_back(std::move(res));
      const bool last = i + 1 == test_d.frags.size() || test_d.trace[i + 1] != test_d.trace[i];
      if (last) {
        const FusionResult f = stage("fuse", [&] { return fuse(record); });
        o.fused.push_back(f.distribution);
        o.fused_truth.push_back(test_d.quality[i]);
        record.actions.clear();
      }
    }
    return 0;
  });
  return o;
}

void add_quality_evaluations(const QualityOutcome& o, const Corpus& corpus, Report& r) {
  r.evaluations.push_back(evaluate("single", o.single, o.single_truth, corpus.classes));
  r.evaluations.push_back(evaluate("fused", o.fused, o.fused_truth, corpus.classes));
  r.evaluations.push_back(evaluate("action", o.action, o.action_truth, action_labels()));
  r.scalars.emplace_back("single_accuracy", r.evaluation("single").accuracy);
  r.scalars.emplace_back("fused_accuracy", r.evaluation("fused").accuracy);
  r.scalars.emplace_back("average_accuracy", r.evaluation("fused").confusion.average_accuracy());
  r.scalars.emplace_back("action_accuracy", r.evaluation("action").accuracy);
}

void run_fusion_eval(const ExperimentSpec& spec, Report& r, StageClock& clock) {
  Table t{"fusion_by_seed", {"seed", "single_accuracy", "fused_accuracy"}, {}};
  QualityOutcome pooled;
  double sum_single = 0.0, sum_fused = 0.0;
  int wins = 0;
  for (int k = 0; k < spec.repeats; ++k) {
    ExperimentSpec s = spec;
    s.seed = spec.seed + static_cast<std::uint64_t>(k);
    s.cnn.seed = spec.cnn.seed + static_cast<std::uint64_t>(k);
    const Corpus corpus = clock.run("generate", [&] { return generate_dataset(s); });
    const QualityOutcome o = run_quality_pipeline(s, corpus, clock);
    std::vector<int> sp, fp;
    for (const auto& d : o.single) sp.push_back(static_cast<int>(d.argmax()));
    for (const auto& d : o.fused) fp.push_back(static_cast<int>(d.argmax()));
    const double a1 = accuracy(sp, o.single_truth);
    const double a2 = accuracy(fp, o.fused_truth);
    t.rows.emplace_back("seed_" + std::to_string(k),
                        std::vector<double>{static_cast<double>(s.seed), a1, a2});
    sum_single += a1;
    sum_fused += a2;
    wins += a2 >= a1;
    auto append = [](auto& to, const auto& from) { to.insert(to.end(), from.begin(), from.end()); };
    append(pooled.single, o.single);
    append(pooled.single_truth, o.single_truth);
    append(pooled.fused, o.fused);
    append(pooled.fused_truth, o.fused_truth);
    append(pooled.action, o.action);
    append(pooled.action_truth, o.action_truth);
    if (k == 0) r.classes = corpus.classes;
  }
  Corpus labels_only;
  labels_only.classes = r.classes;
  add_quality_evaluations(pooled, labels_only, r);
  r.tables.push_back(std::move(t));
  r.scalars.emplace_back("mean_single_accuracy", sum_single / spec.repeats);
  r.scalars.emplace_back("mean_fused_accuracy", sum_fused / spec.repeats);
  r.scalars.emplace_back("seeds_fused_not_worse", wins);
}

// ---- Ablation ------------------------------------------------------------------

double subset_error(const QualityData& train, const QualityData& test,
                    std::span<const std::size_t> columns, int classes, const SvmConfig& cfg) {
  std::size_t wrong = 0;
  std::size_t total = 0;
  for (std::size_t a = 0; a < kActionCount; ++a) {
    std::vector<FeatureMatrix> raw;
    std::vector<int> y;
    for (std::size_t i = 0; i < train.frags.size(); ++i) {
      if (static_cast<std::size_t>(train.actions[i]) != a) continue;
      raw.push_back(quality_features(train.frags[i]));
      y.push_back(train.quality[i]);
    }
    std::vector<std::size_t> test_idx;
    for (std::size_t i = 0; i < test.frags.size(); ++i) {
      if (static_cast<std::size_t>(test.actions[i]) == a) test_idx.push_back(i);
    }
    if (raw.empty() || test_idx.empty()) continue;
    const NormalizationStats norm = fit_normalization(raw);
    VectorDataset d;
    d.classes = classes;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      d.x.push_back(select_columns(normalize(raw[i], norm), columns));
      d.y.push_back(y[i]);
    }
    SvmConfig c = cfg;
    c.seed = cfg.seed + a;
    const SvmModel m = svm_train(d, c);
    for (std::size_t i : test_idx) {
      const auto x = select_columns(normalize(quality_features(test.frags[i]), norm), columns);
      wrong += static_cast<int>(svm_classify(m, x).argmax()) != test.quality[i];
      ++total;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(wrong) / static_cast<double>(total);
}

void run_ablation(const ExperimentSpec& spec, Report& r, StageClock& clock) {
  const auto subsets = ablation_subsets();
  std::vector<std::string> cols;
  for (const auto& s : subsets) cols.push_back(s.name);
  Table t{"ablation_error", cols, {}};
  for (SnrBand band : {SnrBand::kHigh, SnrBand::kLow}) {
    ExperimentSpec s = spec;
    s.snr_band = band;
    const Corpus corpus = clock.run("generate", [&] { return generate_dataset(s); });
    if (r.classes.empty()) r.classes = corpus.classes;
    QualityData train_d, test_d;
    clock.run("segment", [&] {
      train_d = quality_fragments(corpus.train);
      test_d = quality_fragments(corpus.test);
      return 0;
    });
    std::vector<double> row;
    clock.run("classify", [&] {
      for (const auto& sub : subsets) {
        const auto columns = quality_columns(sub.features);
        row.push_back(subset_error(train_d, test_d, columns,
                                   static_cast<int>(corpus.classes.size()), spec.svm));
      }
      return 0;
    });
    t.rows.emplace_back(std::string(to_string(band)), row);
  }
  r.tables.push_back(std::move(t));
}

// ---- Serialization ------------------------------------------------------------

std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string confusion_csv(const ConfusionMatrix& m) {
  std::string s = "true\\predicted";
  for (const auto& l : m.labels) s += "," + l;
  s += ",count\n";
  for (std::size_t r = 0; r < m.labels.size(); ++r) {
    s += m.labels[r];
    for (double v : m.rows[r]) s += "," + csv_number(v);
    s += "," + std::to_string(m.counts[r]) + "\n";
  }
  return s;
}

std::string table_csv(const Table& t) {
  std::string s = "row";
  for (const auto& c : t.columns) s += "," + c;
  s += "\n";
  for (const auto& [name, values] : t.rows) {
    s += name;
    for (double v : values) s += "," + csv_number(v);
    s += "\n";
  }
  return s;
}

ordered_json spec_json(const ExperimentSpec& spec) {
  ordered_json j;
  j["name"] = spec.name;
  j["task"] = std::string(to_string(spec.task));
  j["classes"] = spec.classes;
  j["snr_band"] = std::string(to_string(spec.snr_band));
  j["train_per_class"] = spec.train_per_class;
  j["test_per_class"] = spec.test_per_class;
  j["seed"] = spec.seed;
  j["cnn"] = {{"iterations", spec.cnn.iterations},
              {"learning_rate", spec.cnn.learning_rate},
              {"batch_size", spec.cnn.batch_size},
              {"momentum", spec.cnn.momentum},
              {"hidden", spec.cnn.hidden},
              {"seed", spec.cnn.seed}};
  j["svm"] = {{"iterations", spec.svm.iterations},
              {"lambda", spec.svm.lambda},
              {"seed", spec.svm.seed}};
  j["knn_k"] = spec.knn_k;
  j["iteration_grid"] = spec.iteration_grid;
  j["repeats"] = spec.repeats;
  j["detect_test_boundaries"] = spec.detect_test_boundaries;
  return j;
}

}  // namespace

// ---- Enums and spec ----------------------------------------------------------

std::string_view to_string(Task task) {
  switch (task) {
    case Task::kActionRecognition: return "action_recognition";
    case Task::kBodyStatus: return "body_status";
    case Task::kDriverId: return "driver_id";
    case Task::kDriverCategory: return "driver_category";
    case Task::kFusionEval: return "fusion_eval";
    case Task::kAblation: return "ablation";
  }
  return "?";
}

Task parse_task(std::string_view text) {
  for (Task t : {Task::kActionRecognition, Task::kBodyStatus, Task::kDriverId,
                 Task::kDriverCategory, Task::kFusionEval, Task::kAblation}) {
    if (to_string(t) == text) return t;
  }
  throw Error(ErrorKind::kConfig, "unknown task '" + std::string(text) + "'");
}

std::string_view to_string(SnrBand band) { return band == SnrBand::kHigh ? "high" : "low"; }

SnrBand parse_snr_band(std::string_view text) {
  if (text == "high") return SnrBand::kHigh;
  if (text == "low") return SnrBand::kLow;
  throw Error(ErrorKind::kConfig, "unknown SNR band '" + std::string(text) + "'");
}

std::pair<double, double> snr_range(SnrBand band) {
  return band == SnrBand::kHigh ? std::pair{8.0, 11.0} : std::pair{4.0, 8.0};
}

std::vector<std::string> default_classes(Task task) {
  switch (corpus_task(task)) {
    case Task::kActionRecognition: return action_labels();
    case Task::kBodyStatus: return {"normal", "light", "heavy"};
    case Task::kDriverId: return {"d1", "d2", "d3", "d4", "d5", "d6"};
    case Task::kDriverCategory: return {"experienced", "less", "novice"};
    default: break;
  }
  throw Error(ErrorKind::kConfig, "no label set for task");
}

std::vector<std::string> ExperimentSpec::labels() const { return default_classes(task); }

void ExperimentSpec::validate() const {
  if (name.empty() || name.find_first_of("/\\ \t") != std::string::npos) {
    throw Error(ErrorKind::kConfig, "experiment name must be a non-empty path-safe word");
  }
  if (!classes.empty() && classes != labels()) {
    throw Error(ErrorKind::kConfig, "classes must match the task's label set");
  }
  if (train_per_class < 1 || test_per_class < 1) {
    throw Error(ErrorKind::kConfig, "per-class counts must be >= 1");
  }
  cnn.validate();
  svm.validate();
  if (knn_k < 1) throw Error(ErrorKind::kConfig, "knn_k must be >= 1");
  if (repeats < 1) throw Error(ErrorKind::kConfig, "repeats must be >= 1");
  if (task == Task::kActionRecognition) {
    if (iteration_grid.empty()) throw Error(ErrorKind::kConfig, "empty iteration grid");
    for (int g : iteration_grid) {
      if (g < 1 || g > cnn.iterations) {
        throw Error(ErrorKind::kConfig, "grid iterations must lie in [1, cnn.iterations]");
      }
    }
    if (std::find(iteration_grid.begin(), iteration_grid.end(), cnn.iterations) ==
            iteration_grid.end() ||
        std::find(iteration_grid.begin(), iteration_grid.end(), svm.iterations) ==
            iteration_grid.end()) {
      throw Error(ErrorKind::kConfig, "grid must include the CNN and SVM iteration counts");
    }
    if (knn_k > train_per_class * static_cast<int>(kActionCount)) {
      throw Error(ErrorKind::kConfig, "knn_k exceeds the training set");
    }
  }
}

ExperimentSpec ExperimentSpec::defaults(Task task) {
  ExperimentSpec s;
  s.task = task;
  s.name = std::string(to_string(task));
  if (task == Task::kFusionEval) {
    s.snr_band = SnrBand::kLow;
    s.train_per_class = 40;
    s.test_per_class = 40;
    s.repeats = 10;
  }
  if (task == Task::kAblation) {
    // The subset differences are small; a larger corpus keeps them above
    // sampling noise.
    s.train_per_class = 300;
    s.test_per_class = 300;
  }
  return s;
}

std::string spec_to_json(const ExperimentSpec& spec) { return spec_json(spec).dump(2) + "\n"; }

ExperimentSpec spec_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kConfig, std::string("spec JSON: ") + e.what());
  }
  try {
    ExperimentSpec s = ExperimentSpec::defaults(parse_task(j.at("task").get<std::string>()));
    s.name = j.value("name", s.name);
    s.classes = j.value("classes", s.classes);
    if (j.contains("snr_band")) s.snr_band = parse_snr_band(j["snr_band"].get<std::string>());
    s.train_per_class = j.value("train_per_class", s.train_per_class);
    s.test_per_class = j.value("test_per_class", s.test_per_class);
    s.seed = j.value("seed", s.seed);
    if (j.contains("cnn")) {
      const auto& c = j["cnn"];
      s.cnn.iterations = c.value("iterations", s.cnn.iterations);
      s.cnn.learning_rate = c.value("learning_rate", s.cnn.learning_rate);
      s.cnn.batch_size = c.value("batch_size", s.cnn.batch_size);
      s.cnn.momentum = c.value("momentum", s.cnn.momentum);
      s.cnn.hidden = c.value("hidden", s.cnn.hidden);
      s.cnn.seed = c.value("seed", s.cnn.seed);
    }
    if (j.contains("svm")) {
      const auto& c = j["svm"];
      s.svm.iterations = c.value("iterations", s.svm.iterations);
      s.svm.lambda = c.value("lambda", s.svm.lambda);
      s.svm.seed = c.value("seed", s.svm.seed);
    }
    s.knn_k = j.value("knn_k", s.knn_k);
    s.iteration_grid = j.value("iteration_grid", s.iteration_grid);
    s.repeats = j.value("repeats", s.repeats);
    s.detect_test_boundaries = j.value("detect_test_boundaries", s.detect_test_boundaries);
    for (const auto& [k, v] : j.items()) {
      static const std::set<std::string> known = {
          "name", "task", "classes", "snr_band", "train_per_class", "test_per_class",
          "seed", "cnn", "svm", "knn_k", "iteration_grid", "repeats",
          "detect_test_boundaries"};
      if (!known.count(k)) throw Error(ErrorKind::kConfig, "unknown spec key '" + k + "'");
    }
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kConfig, std::string("spec JSON: ") + e.what());
  }
}

// ---- Dataset --------------------------------------------------------------------

QualityProfile quality_profile(Task task, int quality_class) {
  const Task t = corpus_task(task);
  QualityProfile p;
  if (t == Task::kBodyStatus) {
    static constexpr std::array<std::pair<double, double>, 3> jitter = {
        {{0.0, 0.05}, {0.2, 0.3}, {0.45, 0.6}}};
    if (quality_class < 0 || quality_class >= 3) {
      throw Error(ErrorKind::kParameter, "body status class out of range");
    }
    std::tie(p.jitter_min, p.jitter_max) = jitter[quality_class];
    return p;
  }
  if (t == Task::kDriverId) {
    // speed, extent, gap, jitter centre
    static constexpr std::array<std::array<double, 4>, 6> drivers = {{
        {0.7, 0.9, 30.0, 0.05},
        {1.0, 0.65, 55.0, 0.05},
        {1.35, 0.85, 40.0, 0.1},
        {0.85, 0.6, 65.0, 0.15},
        {1.15, 0.95, 35.0, 0.2},
        {1.0, 0.8, 45.0, 0.3},
    }};
    if (quality_class < 0 || quality_class >= 6) {
      throw Error(ErrorKind::kParameter, "driver class out of range");
    }
    const auto& d = drivers[quality_class];
    p.speed_scale = d[0];
    p.speed_spread = 0.08;
    p.extent = d[1];
    p.extent_spread = 0.05;
    p.gap_ticks = d[2];
    p.gap_spread = 8.0;
    p.jitter_min = std::max(0.0, d[3] - 0.03);
    p.jitter_max = d[3] + 0.03;
    return p;
  }
  if (t == Task::kDriverCategory) {
    static constexpr std::array<std::pair<double, double>, 3> bands = {
        {{0.0, 0.08}, {0.1, 0.2}, {0.25, 0.4}}};
    if (quality_class < 0 || quality_class >= 3) {
      throw Error(ErrorKind::kParameter, "driver category out of range");
    }
    p.speed_spread = 0.2;
    p.extent_spread = 0.12;
    p.gap_spread = 12.0;
    std::tie(p.jitter_min, p.jitter_max) = bands[quality_class];
    return p;
  }
  throw Error(ErrorKind::kParameter, "task has no quality classes");
}

Corpus generate_dataset(const ExperimentSpec& spec) {
  spec.validate();
  Corpus c;
  c.classes = spec.labels();
  const int per_class = spec.train_per_class + spec.test_per_class;
  const Task task = corpus_task(spec.task);
  for (int cls = 0; cls < static_cast<int>(c.classes.size()); ++cls) {
    std::vector<LabeledTrace> all;
    all.reserve(per_class);
    for (int i = 0; i < per_class; ++i) {
      all.push_back(task == Task::kActionRecognition ? make_action_trace(spec, cls, i)
                                                     : make_activity_trace(spec, task, cls, i));
    }
    std::vector<std::size_t> order(all.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(mix(spec.seed, 0x5917, cls));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    for (std::size_t k = 0; k < order.size(); ++k) {
      auto& dst = k < static_cast<std::size_t>(spec.train_per_class) ? c.train : c.test;
      dst.push_back(std::move(all[order[k]]));
    }
  }
  assert_disjoint(c);
  return c;
}

void assert_disjoint(const Corpus& corpus) {
  std::set<std::uint64_t> ids;
  for (const auto& t : corpus.train) {
    if (!ids.insert(t.id).second) {
      throw Error(ErrorKind::kDegenerateDataset, "duplicate trace id in training split");
    }
  }
  for (const auto& t : corpus.test) {
    if (ids.count(t.id)) {
      throw Error(ErrorKind::kDegenerateDataset, "trace shared by training and test splits");
    }
  }
}

// ---- Evaluation ---------------------------------------------------------------------

ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> truths,
                          std::vector<std::string> labels) {
  if (predictions.size() != truths.size()) {
    throw Error(ErrorKind::kDimension, "prediction and truth counts differ");
  }
  const int n = static_cast<int>(labels.size());
  ConfusionMatrix m;
  m.labels = std::move(labels);
  m.rows.assign(n, std::vector<double>(n, 0.0));
  m.counts.assign(n, 0);
  std::vector<std::vector<std::size_t>> tally(n, std::vector<std::size_t>(n, 0));
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (truths[i] < 0 || truths[i] >= n || predictions[i] < 0 || predictions[i] >= n) {
      throw Error(ErrorKind::kParameter, "label outside the label set");
    }
    ++tally[truths[i]][predictions[i]];
    ++m.counts[truths[i]];
  }
  for (int r = 0; r < n; ++r) {
    if (m.counts[r] == 0) continue;
    for (int c = 0; c < n; ++c) {
      m.rows[r][c] = static_cast<double>(tally[r][c]) / static_cast<double>(m.counts[r]);
    }
  }
  return m;
}

std::vector<double> ConfusionMatrix::per_class_accuracy() const {
  std::vector<double> a(labels.size(), 0.0);
  for (std::size_t r = 0; r < labels.size(); ++r) a[r] = rows[r][r];
  return a;
}

double ConfusionMatrix::average_accuracy() const {
  double s = 0.0;
  int n = 0;
  for (std::size_t r = 0; r < labels.size(); ++r) {
    if (counts[r] == 0) continue;
    s += rows[r][r];
    ++n;
  }
  return n == 0 ? 0.0 : s / n;
}

double accuracy(std::span<const int> predictions, std::span<const int> truths) {
  if (predictions.size() != truths.size()) {
    throw Error(ErrorKind::kDimension, "prediction and truth counts differ");
  }
  if (truths.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truths.size(); ++i) hit += predictions[i] == truths[i];
  return static_cast<double>(hit) / static_cast<double>(truths.size());
}

double Table::at(std::string_view row, std::string_view column) const {
  const auto c = std::find(columns.begin(), columns.end(), column);
  if (c == columns.end()) throw Error(ErrorKind::kParameter, "no column " + std::string(column));
  for (const auto& [name, values] : rows) {
    if (name == row) return values[static_cast<std::size_t>(c - columns.begin())];
  }
  throw Error(ErrorKind::kParameter, "no row " + std::string(row));
}

std::vector<FeatureSubset> ablation_subsets() {
  const std::vector<std::string> g3 = {"g_max", "g_min", "g_mean"};
  const std::vector<std::string> ga = {"g_max", "g_min", "g_mean", "g_var"};
  const std::vector<std::string> r3 = {"B1-B2", "B1-gA", "B1-gI"};
  const std::vector<std::string> ra = {"B1-B2", "B1-gA", "B1-gI", "B2-gA", "B2-gI"};
  auto cat = [](std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  std::vector<std::string> all;
  for (auto n : feature_names(Flavor::kQuality)) all.emplace_back(n);
  return {{"G(3)", g3},           {"G(A)", ga},           {"R(3)", r3},
          {"R(A)", ra},           {"G(3)+R(A)", cat(g3, ra)}, {"G(A)+R(A)", cat(ga, ra)},
          {"All", all}};
}

std::vector<std::size_t> quality_columns(std::span<const std::string> names) {
  if (names.empty()) throw Error(ErrorKind::kParameter, "empty feature subset");
  const auto& known = feature_names(Flavor::kQuality);
  std::vector<std::size_t> cols;
  for (const auto& n : names) {
    const auto it = std::find(known.begin(), known.end(), n);
    if (it == known.end()) throw Error(ErrorKind::kParameter, "unknown feature '" + n + "'");
    cols.push_back(static_cast<std::size_t>(it - known.begin()));
  }
  return cols;
}

// ---- Report ------------------------------------------------------------------------

const Evaluation& Report::evaluation(std::string_view name) const {
  for (const auto& e : evaluations) {
    if (e.name == name) return e;
  }
  throw Error(ErrorKind::kParameter, "report has no evaluation " + std::string(name));
}

const Table& Report::table(std::string_view name) const {
  for (const auto& t : tables) {
    if (t.name == name) return t;
  }
  throw Error(ErrorKind::kParameter, "report has no table " + std::string(name));
}

double Report::scalar(std::string_view name) const {
  for (const auto& [n, v] : scalars) {
    if (n == name) return v;
  }
  throw Error(ErrorKind::kParameter, "report has no scalar " + std::string(name));
}

std::string Report::to_json() const {
  ordered_json j;
  j["name"] = spec.name;
  j["task"] = std::string(to_string(spec.task));
  j["scale_note"] =
      "desk-scale synthetic corpus: " + std::to_string(classes.size()) + " classes, " +
      std::to_string(spec.train_per_class) + " train / " + std::to_string(spec.test_per_class) +
      " test samples per class";
  j["spec"] = spec_json(spec);
  j["classes"] = classes;
  ordered_json sc = ordered_json::object();
  for (const auto& [n, v] : scalars) sc[n] = v;
  j["scalars"] = sc;
  ordered_json ev = ordered_json::object();
  for (const auto& e : evaluations) {
    ordered_json x;
    x["accuracy"] = e.accuracy;
    x["average_accuracy"] = e.confusion.average_accuracy();
    ordered_json pc = ordered_json::object();
    const auto acc = e.confusion.per_class_accuracy();
    for (std::size_t i = 0; i < e.confusion.labels.size(); ++i) pc[e.confusion.labels[i]] = acc[i];
    x["per_class_accuracy"] = pc;
    x["rank_k"] = e.rank_k;
    x["confusion"] = "confusion_" + e.name + ".csv";
    ev[e.name] = x;
  }
  j["evaluations"] = ev;
  ordered_json tb = ordered_json::object();
  for (const auto& t : tables) {
    ordered_json x;
    x["file"] = "table_" + t.name + ".csv";
    x["columns"] = t.columns;
    ordered_json rows = ordered_json::object();
    for (const auto& [name, values] : t.rows) rows[name] = values;
    x["rows"] = rows;
    tb[t.name] = x;
  }
  j["tables"] = tb;
  return j.dump(2) + "\n";
}

std::string Report::timing_json() const {
  ordered_json j = ordered_json::object();
  double total = 0.0;
  for (const auto& [n, v] : runtime) {
    j[n] = v;
    total += v;
  }
  j["total"] = total;
  return j.dump(2) + "\n";
}

void Report::write(const fs::path& dir) const {
  fs::create_directories(dir);
  write_text(dir / "report.json", to_json());
  write_text(dir / "timing.json", timing_json());
  for (const auto& e : evaluations) {
    write_text(dir / ("confusion_" + e.name + ".csv"), confusion_csv(e.confusion));
  }
  for (const auto& t : tables) write_text(dir / ("table_" + t.name + ".csv"), table_csv(t));
}

Report run_experiment(const ExperimentSpec& spec) {
  stage("spec", [&] {
    spec.validate();
    return 0;
  });
  Report r;
  r.spec = spec;
  StageClock clock;
  if (spec.task == Task::kFusionEval) {
    run_fusion_eval(spec, r, clock);
  } else if (spec.task == Task::kAblation) {
    run_ablation(spec, r, clock);
  } else {
    const Corpus corpus = clock.run("generate", [&] { return generate_dataset(spec); });
    r.classes = corpus.classes;
    if (spec.task == Task::kActionRecognition) {
      run_action_task(spec, corpus, r, clock);
    } else {
      add_quality_evaluations(run_quality_pipeline(spec, corpus, clock), corpus, r);
    }
  }
  r.runtime = clock.entries();
  return r;
}

std::vector<ExperimentSpec> default_suite(std::uint64_t seed) {
  std::vector<ExperimentSpec> s;
  auto add = [&](Task t, SnrBand band, const std::string& name) {
    ExperimentSpec e = ExperimentSpec::defaults(t);
    e.name = name;
    e.snr_band = band;
    e.seed = seed;
    e.cnn.seed = seed;
    e.svm.seed = seed;
    s.push_back(e);
  };
  add(Task::kActionRecognition, SnrBand::kHigh, "action_high");
  add(Task::kActionRecognition, SnrBand::kLow, "action_low");
  add(Task::kBodyStatus, SnrBand::kHigh, "body_status_high");
  add(Task::kDriverId, SnrBand::kHigh, "driver_id_high");
  add(Task::kDriverCategory, SnrBand::kHigh, "driver_category_high");
  add(Task::kFusionEval, SnrBand::kLow, "fusion_low");
  add(Task::kAblation, SnrBand::kHigh, "ablation");
  return s;
}

std::vector<Report> reproduce_all(const fs::path& out, std::uint64_t seed, int threads) {
  const auto suite = default_suite(seed);
  std::vector<std::optional<Report>> reports(suite.size());
  std::vector<std::string> errors(suite.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < suite.size(); i = next++) {
      try {
        reports[i] = run_experiment(suite[i]);
      } catch (const std::exception& e) {
        errors[i] = suite[i].name + ": " + e.what();
      }
    }
  };
  const int n = std::clamp(threads, 1, static_cast<int>(suite.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (!e.empty()) throw StageError("reproduce-all", e);
  }

  std::vector<Report> out_reports;
  ordered_json summary;
  summary["seed"] = seed;
  ordered_json ex = ordered_json::object();
  for (auto& r : reports) {
    r->write(out / r->spec.name);
    ordered_json sc = ordered_json::object();
    for (const auto& [k, v] : r->scalars) sc[k] = v;
    ex[r->spec.name] = {{"task", std::string(to_string(r->spec.task))}, {"scalars", sc}};
    out_reports.push_back(std::move(*r));
  }
  summary["experiments"] = ex;
  write_text(out / "summary.json", summary.dump(2) + "\n");
  return out_reports;
}

}  // namespace wiq
