// Copyright 2026, The radar_slam Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * \file simulator.hpp
 * \brief Synthetic spinning FMCW radar: point-reflector worlds rendered into
 * polar scans with per-beam motion, range blur, attenuation and speckle.
 *
 * Row a of a scan is rendered from the sensor pose at the row's beam time
 * t_a = (a - N/2) / N * scan_period relative to the scan centre, where the
 * in-scan motion is T_centre * exp_twist(v, t_a).
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "radar_slam/io.hpp"
#include "radar_slam/radar_geometry.hpp"
#include "radar_slam/se2.hpp"

namespace radar_slam {

struct Reflector {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  double reflectivity = 255.0;
};

struct ReflectorWorld {
  std::vector<Reflector> reflectors;
  /// Throws InputError on non-finite positions or negative reflectivity.
  void validate() const;
};

struct SimulatorConfig {
  int n_azimuths = 400;
  int n_range_bins = 350;
  double range_resolution = 0.25;  // m / bin
  double scan_period = 0.25;       // s
  double range_sigma_bins = 1.5;
  /// Azimuth beam width (Gaussian sigma) in rows.
  double beam_sigma_rows = 0.75;
  /// Attenuation 1 / (1 + r / attenuation_range).
  double attenuation_range = 100.0;
  double speckle_std = 4.0;
  double saturation = 255.0;
  /// Relative strength of a ghost return at twice the range; 0 disables.
  double multipath_gain = 0.0;
  uint64_t seed = 1;
  /// Quantise power to integers as an 8-bit sensor would.
  bool quantize = true;
};

/// Per-scan random stream derived deterministically from (seed, index).
std::mt19937_64 scan_rng(uint64_t seed, uint64_t scan_index);

double range_attenuation(double range, double attenuation_range);

/// Adds a Gaussian return centred on `range_bins` whose samples sum to
/// `energy` (up to truncation at the row ends).
void deposit_return(Eigen::Ref<Eigen::RowVectorXd> row, double range_bins, double energy, double sigma_bins);

/// Scan centred at `centre` moving with constant twist `twist`.
PolarScan render_scan(const ReflectorWorld &world, const Pose2 &centre, const Twist2 &twist, double stamp,
                      uint64_t scan_index, const SimulatorConfig &config);

struct SimFrame {
  double stamp = 0.0;
  Pose2 pose;    // sensor pose at the scan centre
  Twist2 twist;  // body twist during the scan
};

/// Integrates T_{k+1} = T_k * exp_twist(v_k, dt); stamps are t0 + k * dt.
std::vector<SimFrame> frames_from_twists(const Pose2 &start, const std::vector<Twist2> &twists, double dt,
                                         double t0 = 0.0);

/// Frames following a pose trajectory, twist_k = log(T_k^-1 T_{k+1}) / dt_k.
/// Throws InputError unless stamps strictly increase.
std::vector<SimFrame> frames_from_trajectory(const Trajectory &trajectory);

/// Twist program for a closed square with rounded corners.
std::vector<Twist2> square_loop_twists(double side, double speed, double turn_rate, double dt);

/// Clumps of reflectors scattered uniformly over [lo, hi]^2.
ReflectorWorld make_clutter_world(const Eigen::Vector2d &lo, const Eigen::Vector2d &hi, int n_clumps,
                                  uint64_t seed);

/// Two parallel walls along x (y = +-half_width) made of regularly spaced
/// reflectors, plus sparse clutter inside.
ReflectorWorld make_corridor_world(double length, double half_width, uint64_t seed);

/// Renders every frame and writes scans, manifest and ground truth.
void generate_sequence(const std::filesystem::path &dir, const ReflectorWorld &world,
                       const std::vector<SimFrame> &frames, const SimulatorConfig &config);

/// Renders frames in memory.
std::vector<PolarScan> render_sequence(const ReflectorWorld &world, const std::vector<SimFrame> &frames,
                                       const SimulatorConfig &config);

Trajectory ground_truth(const std::vector<SimFrame> &frames);

}  // namespace radar_slam
