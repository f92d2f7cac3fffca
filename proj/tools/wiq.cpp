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

// wiq: command line front end for the WiQ pipeline.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wiq/boundary.hpp"
#include "wiq/error.hpp"
#include "wiq/features.hpp"
#include "wiq/fusion.hpp"
#include "wiq/harness.hpp"
#include "wiq/io.hpp"
#include "wiq/learn.hpp"
#include "wiq/preprocess.hpp"
#include "wiq/recognizer.hpp"
#include "wiq/signal_sim.hpp"

namespace fs = std::filesystem;

namespace {

const std::map<std::string, wiq::WaveletFamily> kFamilies = {
    {"haar", wiq::WaveletFamily::kHaar},
    {"db2", wiq::WaveletFamily::kDb2},
    {"db4", wiq::WaveletFamily::kDb4},
    {"sym4", wiq::WaveletFamily::kSym4}};

const std::map<std::string, wiq::ThresholdRule> kRules = {
    {"soft", wiq::ThresholdRule::kSoft}, {"hard", wiq::ThresholdRule::kHard}};

int thread_count() {
  const char* v = std::getenv("WIQ_THREADS");
  if (v == nullptr || *v == '\0') return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1) {
    throw wiq::Error(wiq::ErrorKind::kConfig, "WIQ_THREADS must be a positive integer");
  }
  return static_cast<int>(n);
}

void print_audit() {
  const wiq::DistributionAudit a = wiq::distribution_audit();
  std::printf("distributions %zu max_sum_error %.3e min_probability %.3e\n", a.count,
              a.max_sum_error, a.min_probability);
}

void print_table(const wiq::Report& r) {
  std::printf("%s (%s)\n", r.spec.name.c_str(), std::string(wiq::to_string(r.spec.task)).c_str());
  for (const auto& [name, v] : r.scalars) std::printf("  %-28s %.4f\n", name.c_str(), v);
}

// Fragments file -> one matrix per fragment. With several fragments the
// output name gets a _<k> suffix before the extension.
fs::path numbered(const fs::path& out, std::size_t k, std::size_t count) {
  if (count == 1) return out;
  fs::path p = out;
  p.replace_filename(out.stem().string() + "_" + std::to_string(k) + out.extension().string());
  return p;
}

struct Labeled {
  std::vector<wiq::LabeledMatrix> data;
  std::vector<std::string> labels;
  wiq::Flavor flavor;
};

// Matrices from a directory, labels taken from their headers. Action data
// keeps the canonical action order (with idle last, if present); quality
// labels are sorted.
Labeled load_labeled(const fs::path& dir, std::optional<wiq::Flavor> flavor,
                     std::optional<std::vector<std::string>> labels) {
  const auto files = wiq::read_matrix_dir(dir);
  if (files.empty()) {
    throw wiq::Error(wiq::ErrorKind::kDegenerateDataset, "no .matrix files in " + dir.string());
  }
  Labeled out;
  out.flavor = flavor.value_or(files.front().second.matrix.flavor);
  std::set<std::string> seen;
  for (const auto& [path, m] : files) {
    if (m.matrix.flavor != out.flavor) {
      throw wiq::Error(wiq::ErrorKind::kFormat, path.string() + ": flavor mismatch");
    }
    if (!m.label) throw wiq::Error(wiq::ErrorKind::kFormat, path.string() + ": missing label");
    seen.insert(*m.label);
  }
  if (labels) {
    out.labels = *labels;
  } else if (out.flavor == wiq::Flavor::kAction) {
    out.labels = wiq::action_labels();
    if (seen.count(std::string(wiq::kIdleLabel))) out.labels.emplace_back(wiq::kIdleLabel);
  } else {
    out.labels.assign(seen.begin(), seen.end());
  }
  for (const auto& [path, m] : files) {
    const auto it = std::find(out.labels.begin(), out.labels.end(), *m.label);
    if (it == out.labels.end()) {
      throw wiq::Error(wiq::ErrorKind::kFormat, path.string() + ": unknown label " + *m.label);
    }
    out.data.push_back({m.matrix, static_cast<int>(it - out.labels.begin())});
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"WiQ: RSS-based action and action-quality recognition"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Synthesize a noisy RSS trace from an action script");
  std::string sim_script, sim_out;
  double sim_snr = 9.0;
  std::uint64_t sim_seed = 7;
  int sim_ticks = 0;
  sim->add_option("--script", sim_script, "Action script (JSON)")->required();
  auto* snr_opt = sim->add_option("--snr", sim_snr, "Target SNR in dB");
  sim->add_flag("--clean", "Skip the noise stage")->excludes(snr_opt);
  sim->add_option("--seed", sim_seed, "Noise seed");
  sim->add_option("--ticks", sim_ticks, "Trace length (default: last action end + 100)");
  sim->add_option("--out", sim_out, "Output trace")->required();

  // denoise
  auto* den = app.add_subcommand("denoise", "Wavelet-denoise a trace");
  std::string den_in, den_out, den_family = "db2", den_rule = "soft";
  int den_levels = 4;
  double den_scale = 1.0;
  den->add_option("--in", den_in)->required();
  den->add_option("--levels", den_levels);
  den->add_option("--rule", den_rule)->check(CLI::IsMember({"soft", "hard"}));
  den->add_option("--family", den_family)->check(CLI::IsMember({"haar", "db2", "db4", "sym4"}));
  den->add_option("--threshold-scale", den_scale);
  den->add_option("--out", den_out)->required();

  // segment
  auto* seg = app.add_subcommand("segment", "Detect action boundaries in a denoised trace");
  std::string seg_in, seg_out, seg_model;
  wiq::BoundaryParams seg_p;
  seg->add_option("--in", seg_in)->required();
  seg->add_option("--L", seg_p.window);
  seg->add_option("--step", seg_p.step);
  seg->add_option("--alpha", seg_p.alpha);
  seg->add_option("--delta", seg_p.delta);
  auto* seg_adaptive = seg->add_flag("--adaptive-delta", "Estimate delta from recent strengths");
  seg->add_option("--model", seg_model,
                  "Action model used to prune candidates (default: pair each start with the "
                  "next end)");
  seg->add_option("--out", seg_out, "Fragments file (default: stdout)");

  // extract
  auto* ext = app.add_subcommand("extract", "Extract 10x10 feature matrices from fragments");
  std::string ext_in, ext_out, ext_flavor = "quality", ext_label;
  ext->add_option("--in", ext_in, "Fragments file")->required();
  ext->add_option("--flavor", ext_flavor)->check(CLI::IsMember({"quality", "action"}));
  ext->add_option("--label", ext_label, "Class label stored in the matrix header");
  ext->add_option("--out", ext_out)->required();

  // train
  auto* trn = app.add_subcommand("train", "Train a CNN+NMLP model on labeled matrices");
  std::string trn_flavor = "action", trn_data, trn_out;
  wiq::TrainConfig trn_cfg;
  trn->add_option("--flavor", trn_flavor)->check(CLI::IsMember({"quality", "action"}));
  trn->add_option("--data", trn_data, "Directory of labeled .matrix files")->required();
  trn->add_option("--iters", trn_cfg.iterations, "Training epochs");
  trn->add_option("--seed", trn_cfg.seed);
  trn->add_option("--lr", trn_cfg.learning_rate);
  trn->add_option("--hidden", trn_cfg.hidden, "NMLP hidden width (0: linear)");
  trn->add_option("--out", trn_out)->required();

  // eval
  auto* evl = app.add_subcommand("eval", "Evaluate a model on labeled matrices");
  std::string evl_model, evl_data;
  evl->add_option("--model", evl_model)->required();
  evl->add_option("--data", evl_data)->required();

  // fuse
  auto* fus = app.add_subcommand("fuse", "Fuse per-action results into an activity decision");
  std::string fus_in, fus_out;
  fus->add_option("--in", fus_in, "Activity results file")->required();
  fus->add_option("--out", fus_out, "Decision file (JSON)")->required();

  // run
  auto* run = app.add_subcommand("run", "Run one experiment from a JSON spec");
  std::string run_spec, run_out;
  run->add_option("--spec", run_spec)->required();
  run->add_option("--out", run_out)->required();

  // reproduce-all
  auto* rep = app.add_subcommand("reproduce-all", "Run the default experiment suite");
  std::string rep_out;
  std::uint64_t rep_seed = 7;
  rep->add_option("--out", rep_out)->required();
  rep->add_option("--seed", rep_seed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      const wiq::ActionScript script = wiq::read_script(sim_script);
      int ticks = sim_ticks;
      if (ticks <= 0) {
        int last = 0;
        for (const auto& e : script.entries) last = std::max(last, e.end_tick());
        ticks = last + 100;
      }
      wiq::RssTrace t = wiq::trajectory_to_rss(
          wiq::synth_trajectory(script, wiq::kDefaultTickSeconds, ticks), wiq::ChannelModel{});
      if (!sim->count("--clean")) t = wiq::add_noise(t, sim_snr, sim_seed);
      wiq::write_trace(t, sim_out);
    } else if (*den) {
      wiq::WaveletConfig cfg;
      cfg.family = kFamilies.at(den_family);
      cfg.threshold_rule = kRules.at(den_rule);
      cfg.decomposition_levels = den_levels;
      cfg.threshold_scale = den_scale;
      wiq::write_trace(wiq::denoise(wiq::read_trace(den_in), cfg), den_out);
    } else if (*seg) {
      seg_p.validate();
      const wiq::RssTrace t = wiq::read_trace(seg_in);
      const wiq::GradientSequence gs = wiq::gradient(t);
      const auto cands = *seg_adaptive ? wiq::detect_boundaries_adaptive(gs, t.samples, seg_p)
                                       : wiq::detect_boundaries(gs, seg_p);
      wiq::FragmentFile f;
      f.trace = seg_in;
      if (!seg_model.empty()) {
        const wiq::ActionRecognizer rec{wiq::read_model(seg_model)};
        rec.validate();
        for (const auto& frag : wiq::prune_boundaries(cands, t, rec.scorer(), seg_p).fragments) {
          f.bounds.push_back(frag.bounds());
        }
      } else {
        std::optional<int> open;
        for (const auto& c : cands) {
          if (c.kind == wiq::BoundaryKind::kStart) {
            if (!open) open = c.index;
          } else if (open && c.index - *open + 1 >= 2 * seg_p.window) {
            f.bounds.push_back({*open, c.index});
            open.reset();
          }
        }
      }
      if (seg_out.empty()) {
        for (const auto& b : f.bounds) std::printf("%d,%d\n", b.start, b.end);
      } else {
        wiq::write_fragments(f, seg_out);
      }
    } else if (*ext) {
      const wiq::FragmentFile f = wiq::read_fragments(ext_in);
      if (f.bounds.empty()) throw wiq::Error(wiq::ErrorKind::kParameter, "no fragments");
      fs::path trace_path = f.trace;
      if (trace_path.is_relative() && !fs::exists(trace_path)) {
        trace_path = fs::path(ext_in).parent_path() / trace_path;
      }
      const wiq::RssTrace t = wiq::read_trace(trace_path);
      const wiq::GradientSequence gs = wiq::gradient(t);
      const wiq::Flavor flavor = wiq::parse_flavor(ext_flavor);
      for (std::size_t k = 0; k < f.bounds.size(); ++k) {
        wiq::MatrixFile m;
        m.matrix = wiq::extract_features(wiq::make_fragment(t, gs, f.bounds[k]), flavor);
        if (!ext_label.empty()) m.label = ext_label;
        wiq::write_matrix(m, numbered(ext_out, k, f.bounds.size()));
      }
    } else if (*trn) {
      const Labeled d = load_labeled(trn_data, wiq::parse_flavor(trn_flavor), std::nullopt);
      double last_loss = 0.0;
      const wiq::Model m = wiq::train(d.data, d.labels, trn_cfg,
                                      [&](int, double loss, const wiq::NetworkParams&) {
                                        last_loss = loss;
                                      });
      wiq::write_model(m, trn_out);
      std::printf("trained %zu samples, %zu classes, final loss %.6f\n", d.data.size(),
                  d.labels.size(), last_loss);
    } else if (*evl) {
      const wiq::Model m = wiq::read_model(evl_model);
      const Labeled d = load_labeled(evl_data, m.flavor, m.labels);
      std::vector<int> pred, truth;
      for (const auto& s : d.data) {
        pred.push_back(static_cast<int>(m.predict(s.x).argmax()));
        truth.push_back(s.label);
      }
      const wiq::ConfusionMatrix cm = wiq::confusion(pred, truth, m.labels);
      std::printf("samples %zu\naccuracy %.6f\naverage_accuracy %.6f\n", d.data.size(),
                  wiq::accuracy(pred, truth), cm.average_accuracy());
      for (std::size_t r = 0; r < cm.labels.size(); ++r) {
        std::printf("%-12s", cm.labels[r].c_str());
        for (double v : cm.rows[r]) std::printf(" %.3f", v);
        std::printf("\n");
      }
    } else if (*fus) {
      const wiq::ActivityResults in = wiq::read_activity_results(fus_in);
      wiq::write_text(fus_out, wiq::decision_to_json(wiq::fuse(in.record), in.quality_labels));
    } else if (*run) {
      const wiq::ExperimentSpec spec = wiq::spec_from_json(wiq::read_text(run_spec));
      const wiq::Report r = wiq::run_experiment(spec);
      r.write(run_out);
      print_table(r);
      print_audit();
    } else if (*rep) {
      for (const auto& r : wiq::reproduce_all(rep_out, rep_seed, thread_count())) print_table(r);
      print_audit();
    }
  } catch (const wiq::Error& e) {
    std::cerr << "wiq: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "wiq: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
