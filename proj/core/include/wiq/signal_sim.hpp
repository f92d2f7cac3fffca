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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wiq/types.hpp"

namespace wiq {

// 200 Hz receiver sampling.
inline constexpr double kDefaultTickSeconds = 0.005;
// Ticks a "regular" pedal motion takes when a script leaves the duration to
// its speed profile.
inline constexpr int kRegularActionTicks = 50;

// Ticks for one action at the given speed. Fast is half of regular, slow is
// double.
int profile_duration(SpeedProfile profile, int regular_ticks = kRegularActionTicks);

struct ScriptEntry {
  Action action = Action::kTP;
  int start_tick = 0;
  // <= 0 means "derive from the speed profile".
  int duration_ticks = 0;
  // Press: absolute displacement reached at the end of the motion.
  // Release: fraction of the current displacement given back (1 = fully up).
  double extent = 1.0;
  SpeedProfile speed = SpeedProfile::kRegular;
  // RMS of a smooth random perturbation of the motion, as a fraction of the
  // travel. Zero gives an ideal constant-velocity motion.
  double jitter = 0.0;
  std::uint64_t jitter_seed = 0;

  int resolved_duration() const;
  int end_tick() const { return start_tick + resolved_duration(); }
};

struct ActionScript {
  std::vector<ScriptEntry> entries;
  Activity activity = Activity::kFree;
  // Displacement of each pedal (indexed by Pedal) at tick 0.
  std::array<double, kPedalCount> initial_positions{};
  // Driver / body-status label carried into the ground truth; -1 if unknown.
  int quality_class = -1;

  // Throws kScriptInvalid on unsorted or overlapping entries, inconsistent
  // press/release pairing, or out-of-range extents and positions.
  void validate() const;
};

struct GroundTruth {
  Action action = Action::kTP;
  int start = 0;  // first sample of the motion
  int end = 0;    // sample at which the motion completes (inclusive)
  int quality_class = -1;

  bool operator==(const GroundTruth&) const = default;
};

struct PedalTrajectory {
  Pedal pedal = Pedal::kClutch;
  std::vector<double> positions;  // normalized displacement per tick
  double tick_seconds = kDefaultTickSeconds;
};

struct TrajectorySet {
  std::array<PedalTrajectory, kPedalCount> pedals;
  std::vector<GroundTruth> ground_truth;

  const PedalTrajectory& operator[](Pedal p) const {
    return pedals[static_cast<std::size_t>(p)];
  }
};

struct RssTrace {
  std::vector<double> samples;  // dB relative to an arbitrary reference
  double tick_seconds = kDefaultTickSeconds;
  std::vector<GroundTruth> ground_truth;
  std::optional<double> snr_db;

  std::size_t size() const noexcept { return samples.size(); }
  // Length >= 2, positive tick, finite samples, ground truth in range.
  void validate() const;
};

// Maps pedal displacement to a received-strength offset. The throttle
// response is strictly increasing; clutch and brake dip to a single interior
// minimum and then rise again. Multipath ripple is a monotone warp of the
// displacement axis, so it perturbs the curves without adding extrema.
struct ChannelModel {
  double base_strength_db = -50.0;

  double throttle_gain_db = 10.0;

  double brake_depth_db = 12.0;
  double brake_turn = 0.75;
  double brake_end_db = -9.0;

  double clutch_depth_db = 8.0;
  double clutch_turn = 0.5;
  double clutch_end_db = 4.0;

  // In [0, 1); strength of the displacement warp.
  double multipath_ripple_amplitude = 0.3;
  int ripple_cycles = 3;

  // Received strength never drops below the receiver noise floor.
  double noise_floor_db = -95.0;

  void validate() const;
  double response(Pedal pedal, double displacement) const;
};

TrajectorySet synth_trajectory(const ActionScript& script, double tick_seconds,
                               int total_ticks);

RssTrace trajectory_to_rss(const TrajectorySet& trajectories,
                           const ChannelModel& model);

// Additive zero-mean Gaussian noise in the dB domain, rescaled so that
// 10*log10(var(signal) / var(noise)) equals the target exactly.
RssTrace add_noise(const RssTrace& trace, double target_snr_db,
                   std::uint64_t seed);

// Fixed noise standard deviation instead of a target SNR; snr_db is left
// unset.
RssTrace add_noise_sigma(const RssTrace& trace, double sigma_db,
                         std::uint64_t seed);

// Population variance around the mean.
double signal_variance(std::span<const double> samples);
double measure_snr_db(std::span<const double> clean,
                      std::span<const double> noisy);

// Ordered actions of a driving activity and which pedals start pressed.
struct ActivityTemplate {
  std::vector<Action> actions;
  std::array<bool, kPedalCount> initially_pressed{};
};
ActivityTemplate activity_template(Activity activity);

}  // namespace wiq
