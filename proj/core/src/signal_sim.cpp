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

#include "wiq/signal_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "wiq/error.hpp"

namespace wiq {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr int kJitterModes = 6;

std::size_t idx(Pedal p) { return static_cast<std::size_t>(p); }

// Dips from 0 to -depth at `turn`, then rises to `end` at full travel.
// Both pieces have zero slope at the turn so the curve is C1.
double unimodal(double d, double depth, double turn, double end) {
  if (d <= turn) {
    return -depth * std::sin(kHalfPi * d / turn);
  }
  const double s = std::sin(kHalfPi * (d - turn) / (1.0 - turn));
  return -depth + (end + depth) * s * s;
}

// Smooth zero-endpoint perturbation with unit RMS over [0, 1].
std::array<double, kJitterModes> jitter_modes(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::array<double, kJitterModes> a{};
  double energy = 0.0;
  for (int m = 0; m < kJitterModes; ++m) {
    a[m] = normal(rng) / std::sqrt(static_cast<double>(m + 1));
    energy += a[m] * a[m];
  }
  // mean of sin^2 over a whole number of half periods is 1/2
  const double rms = std::sqrt(energy / 2.0);
  if (rms > 0.0) {
    for (double& v : a) v /= rms;
  }
  return a;
}

double jitter_at(const std::array<double, kJitterModes>& a, double u) {
  double v = 0.0;
  for (int m = 0; m < kJitterModes; ++m) {
    v += a[m] * std::sin(std::numbers::pi * (m + 1) * u);
  }
  return v;
}

}  // namespace

int profile_duration(SpeedProfile profile, int regular_ticks) {
  if (regular_ticks < 2) {
    throw Error(ErrorKind::kParameter, "regular duration must be >= 2 ticks");
  }
  switch (profile) {
    case SpeedProfile::kFast: return regular_ticks / 2;
    case SpeedProfile::kRegular: return regular_ticks;
    case SpeedProfile::kSlow: return regular_ticks * 2;
  }
  return regular_ticks;
}

int ScriptEntry::resolved_duration() const {
  return duration_ticks > 0 ? duration_ticks : profile_duration(speed);
}

void ActionScript::validate() const {
  for (double p : initial_positions) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorKind::kScriptInvalid, "initial position outside [0,1]");
    }
  }
  std::array<double, kPedalCount> pos = initial_positions;
  int previous_end = -1;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const ScriptEntry& e = entries[i];
    const std::string where = "entry " + std::to_string(i) + " (" +
                              std::string(to_string(e.action)) + ")";
    if (e.start_tick < 0) {
      throw Error(ErrorKind::kScriptInvalid, where + " starts before tick 0");
    }
    if (e.start_tick < previous_end) {
      throw Error(ErrorKind::kScriptInvalid,
                  where + " overlaps the previous entry or is out of order");
    }
    if (!(e.extent > 0.0 && e.extent <= 1.0)) {
      throw Error(ErrorKind::kScriptInvalid, where + " extent outside (0,1]");
    }
    if (!(e.jitter >= 0.0) || !std::isfinite(e.jitter)) {
      throw Error(ErrorKind::kScriptInvalid, where + " negative jitter");
    }
    double& p = pos[idx(pedal_of(e.action))];
    if (is_press(e.action)) {
      if (!(p < e.extent)) {
        throw Error(ErrorKind::kScriptInvalid,
                    where + " presses a pedal already at or beyond its extent");
      }
      p = e.extent;
    } else {
      if (!(p > 0.0)) {
        throw Error(ErrorKind::kScriptInvalid,
                    where + " releases a pedal that is not pressed");
      }
      p = p * (1.0 - e.extent);
    }
    previous_end = e.end_tick();
  }
}

void RssTrace::validate() const {
  if (samples.size() < 2) {
    throw Error(ErrorKind::kDimension, "trace needs at least 2 samples");
  }
  if (!(tick_seconds > 0.0) || !std::isfinite(tick_seconds)) {
    throw Error(ErrorKind::kParameter, "tick_seconds must be positive");
  }
  for (double s : samples) {
    if (!std::isfinite(s)) {
      throw Error(ErrorKind::kParameter, "trace contains a non-finite sample");
    }
  }
  const int n = static_cast<int>(samples.size());
  for (const GroundTruth& g : ground_truth) {
    if (g.start < 0 || g.end >= n || g.start > g.end) {
      throw Error(ErrorKind::kDimension, "ground-truth interval outside trace");
    }
  }
}

void ChannelModel::validate() const {
  auto bad = [](const char* what) { throw Error(ErrorKind::kParameter, what); };
  if (!(throttle_gain_db > 0.0)) bad("throttle gain must be positive");
  if (!(brake_depth_db > 0.0) || !(clutch_depth_db > 0.0)) {
    bad("clutch/brake depth must be positive");
  }
  if (!(brake_turn > 0.0 && brake_turn < 1.0) ||
      !(clutch_turn > 0.0 && clutch_turn < 1.0)) {
    bad("turning displacement must be interior");
  }
  if (!(brake_end_db > -brake_depth_db) || !(clutch_end_db > -clutch_depth_db)) {
    bad("clutch/brake curve must rise after its minimum");
  }
  if (!(multipath_ripple_amplitude >= 0.0 && multipath_ripple_amplitude < 1.0)) {
    bad("ripple amplitude must be in [0,1)");
  }
  if (ripple_cycles < 1) bad("ripple cycles must be >= 1");
}

double ChannelModel::response(Pedal pedal, double displacement) const {
  const double d0 = std::clamp(displacement, 0.0, 1.0);
  const double w = 2.0 * std::numbers::pi * ripple_cycles;
  const double d = d0 + multipath_ripple_amplitude * std::sin(w * d0) / w;
  switch (pedal) {
    case Pedal::kThrottle:
      return throttle_gain_db * (0.6 * d + 0.4 * d * d);
    case Pedal::kBrake:
      return unimodal(d, brake_depth_db, brake_turn, brake_end_db);
    case Pedal::kClutch:
      return unimodal(d, clutch_depth_db, clutch_turn, clutch_end_db);
  }
  return 0.0;
}

TrajectorySet synth_trajectory(const ActionScript& script, double tick_seconds,
                               int total_ticks) {
  script.validate();
  if (!(tick_seconds > 0.0)) {
    throw Error(ErrorKind::kParameter, "tick_seconds must be positive");
  }
  if (total_ticks < 2) {
    throw Error(ErrorKind::kParameter, "total_ticks must be >= 2");
  }
  if (!script.entries.empty() && script.entries.back().end_tick() >= total_ticks) {
    throw Error(ErrorKind::kScriptInvalid, "script runs past total_ticks");
  }

  TrajectorySet out;
  for (std::size_t p = 0; p < kPedalCount; ++p) {
    out.pedals[p].pedal = static_cast<Pedal>(p);
    out.pedals[p].tick_seconds = tick_seconds;
    out.pedals[p].positions.assign(static_cast<std::size_t>(total_ticks),
                                   script.initial_positions[p]);
  }

  std::array<double, kPedalCount> current = script.initial_positions;
  for (const ScriptEntry& e : script.entries) {
    const std::size_t p = idx(pedal_of(e.action));
    const double from = current[p];
    const double to = is_press(e.action) ? e.extent : from * (1.0 - e.extent);
    const int duration = e.resolved_duration();
    const auto modes = jitter_modes(e.jitter_seed);
    const double travel = std::abs(to - from);
    auto& pos = out.pedals[p].positions;
    for (int k = 0; k <= duration; ++k) {
      const double u = static_cast<double>(k) / duration;
      double x = from + (to - from) * u;
      if (e.jitter > 0.0) x += e.jitter * travel * jitter_at(modes, u);
      pos[static_cast<std::size_t>(e.start_tick + k)] = std::clamp(x, 0.0, 1.0);
    }
    for (int k = e.end_tick() + 1; k < total_ticks; ++k) {
      pos[static_cast<std::size_t>(k)] = to;
    }
    current[p] = to;
    out.ground_truth.push_back(
        GroundTruth{e.action, e.start_tick, e.end_tick(), script.quality_class});
  }
  return out;
}

RssTrace trajectory_to_rss(const TrajectorySet& trajectories,
                           const ChannelModel& model) {
  model.validate();
  const std::size_t n = trajectories.pedals[0].positions.size();
  const double tick = trajectories.pedals[0].tick_seconds;
  for (const PedalTrajectory& t : trajectories.pedals) {
    if (t.positions.size() != n) {
      throw Error(ErrorKind::kDimension, "pedal trajectories differ in length");
    }
    if (t.tick_seconds != tick) {
      throw Error(ErrorKind::kDimension, "pedal trajectories differ in tick");
    }
  }
  RssTrace trace;
  trace.tick_seconds = tick;
  trace.samples.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    double s = model.base_strength_db;
    for (const PedalTrajectory& t : trajectories.pedals) {
      s += model.response(t.pedal, t.positions[k]);
    }
    trace.samples[k] = std::max(s, model.noise_floor_db);
  }
  trace.ground_truth = trajectories.ground_truth;
  trace.validate();
  return trace;
}

double signal_variance(std::span<const double> samples) {
  if (samples.empty()) return 0.0;
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  return var / static_cast<double>(samples.size());
}

double measure_snr_db(std::span<const double> clean,
                      std::span<const double> noisy) {
  if (clean.size() != noisy.size() || clean.empty()) {
    throw Error(ErrorKind::kDimension, "SNR needs equal-length traces");
  }
  std::vector<double> noise(clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i) noise[i] = noisy[i] - clean[i];
  return 10.0 * std::log10(signal_variance(clean) / signal_variance(noise));
}

namespace {

std::vector<double> unit_noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> z(n);
  for (double& v : z) v = normal(rng);
  double mean = 0.0;
  for (double v : z) mean += v;
  mean /= static_cast<double>(n);
  for (double& v : z) v -= mean;
  const double sd = std::sqrt(signal_variance(z));
  if (sd > 0.0) {
    for (double& v : z) v /= sd;
  }
  return z;
}

void check_clean(const RssTrace& trace) {
  trace.validate();
  if (trace.snr_db.has_value()) {
    throw Error(ErrorKind::kParameter, "trace already carries noise");
  }
}

}  // namespace

RssTrace add_noise(const RssTrace& trace, double target_snr_db,
                   std::uint64_t seed) {
  if (!std::isfinite(target_snr_db)) {
    throw Error(ErrorKind::kParameter, "target SNR must be finite");
  }
  check_clean(trace);
  const double var = signal_variance(trace.samples);
  if (!(var > 0.0)) {
    throw Error(ErrorKind::kParameter, "SNR is undefined for a constant trace");
  }
  const double sigma = std::sqrt(var / std::pow(10.0, target_snr_db / 10.0));
  RssTrace out = trace;
  const auto z = unit_noise(trace.size(), seed);
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    out.samples[i] += sigma * z[i];
  }
  out.snr_db = target_snr_db;
  return out;
}

RssTrace add_noise_sigma(const RssTrace& trace, double sigma_db,
                         std::uint64_t seed) {
  if (!(sigma_db >= 0.0) || !std::isfinite(sigma_db)) {
    throw Error(ErrorKind::kParameter, "noise sigma must be finite and >= 0");
  }
  check_clean(trace);
  RssTrace out = trace;
  const auto z = unit_noise(trace.size(), seed);
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    out.samples[i] += sigma_db * z[i];
  }
  return out;
}

ActivityTemplate activity_template(Activity activity) {
  using A = Action;
  ActivityTemplate t;
  auto pressed = [&t](Pedal p) { t.initially_pressed[idx(p)] = true; };
  switch (activity) {
    case Activity::kGroundStart:
      t.actions = {A::kCP, A::kCR, A::kTP};
      break;
    case Activity::kParking:
      pressed(Pedal::kThrottle);
      t.actions = {A::kTR, A::kCP, A::kBP, A::kBR, A::kCR};
      break;
    case Activity::kHillStart:
      pressed(Pedal::kBrake);
      t.actions = {A::kCP, A::kBR, A::kTP, A::kCR};
      break;
    case Activity::kAcceleration:
      pressed(Pedal::kThrottle);
      t.actions = {A::kTR, A::kCP, A::kCR, A::kTP};
      break;
    case Activity::kDeceleration:
      pressed(Pedal::kThrottle);
      t.actions = {A::kTR, A::kBP, A::kBR};
      break;
    case Activity::kFree:
      break;
  }
  return t;
}

}  // namespace wiq
