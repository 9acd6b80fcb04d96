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
 * \file io.hpp
 * \brief On-disk formats: binary polar scans, sequence manifests and
 * plain-text trajectories.
 *
 * Polar scan file (little endian):
 *   char[4]  magic "RPS1"
 *   u32      n_azimuths
 *   u32      n_range_bins
 *   f64      range_resolution_m
 *   f64      scan_period_s
 *   f64      stamp_s
 *   u8       has_azimuth_stamps
 *   f64[n_azimuths]               azimuth stamps, only if has_azimuth_stamps
 *   u8[n_azimuths * n_range_bins] power, row major
 *
 * A sequence is a directory holding scan files and a manifest.txt that lists
 * the scan file names in time order, one per line.
 */
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "radar_slam/radar_geometry.hpp"
#include "radar_slam/se2.hpp"

namespace radar_slam {

inline constexpr const char *kManifestName = "manifest.txt";
inline constexpr const char *kGroundTruthName = "ground_truth.txt";

/// Serializes a scan; powers are rounded and clamped to [0, 255].
std::vector<unsigned char> encode_polar_scan(const PolarScan &scan);
PolarScan decode_polar_scan(const std::vector<unsigned char> &bytes);

void write_polar_scan(const std::filesystem::path &path, const PolarScan &scan);
/// Throws IoError naming the file on any read or format failure.
PolarScan read_polar_scan(const std::filesystem::path &path);

/// Scan file names of a sequence directory, in manifest order.
std::vector<std::string> read_manifest(const std::filesystem::path &sequence_dir);
void write_manifest(const std::filesystem::path &sequence_dir,
                    const std::vector<std::string> &names);

struct StampedPose {
  double stamp = 0.0;
  Pose2 pose;
};
using Trajectory = std::vector<StampedPose>;

/// "stamp x y yaw" per line.
void write_trajectory(const std::filesystem::path &path, const Trajectory &trajectory);
Trajectory read_trajectory(const std::filesystem::path &path);

/// "x y" per line.
void write_points(const std::filesystem::path &path, const std::vector<Eigen::Vector2d> &points);

}  // namespace radar_slam
