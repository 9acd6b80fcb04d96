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
 * \file features.hpp
 * \brief Blob keypoints on Cartesian radar images, adaptive non-maximal
 * suppression, pyramidal Lucas-Kanade tracking and grid-based respawning.
 */
#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "radar_slam/radar_geometry.hpp"

namespace radar_slam {

struct Keypoint {
  Eigen::Vector2d pixel = Eigen::Vector2d::Zero();  // (u, v)
  double response = 0.0;
};

enum class FeatureStatus { kAlive, kLost };

struct TrackedFeature {
  int64_t id = -1;
  Eigen::Vector2d pixel = Eigen::Vector2d::Zero();
  double beam_time = 0.0;
  FeatureStatus status = FeatureStatus::kAlive;
  int age = 0;

  bool alive() const { return status == FeatureStatus::kAlive; }
};

struct DetectorOptions {
  double min_hessian = 700.0;
  /// Gaussian pre-smoothing, pixels.
  double sigma = 2.0;
  /// Strongest candidates kept before ANMS.
  int max_candidates = 3000;
};

/// Local maxima of the scale-normalised Hessian determinant
/// sigma^4 * (Lxx * Lyy - Lxy^2) of the smoothed image, restricted to bright
/// blobs (negative Laplacian). Sub-pixel refined, sorted by response
/// descending, ties broken by (v, u).
std::vector<Keypoint> detect_keypoints(const CartesianImage &img,
                                       const DetectorOptions &options = {});
std::vector<Keypoint> detect_keypoints(const CartesianImage &img, double min_hessian);

/// Adaptive non-maximal suppression. Each candidate's suppression radius is
/// the distance to the nearest stronger candidate; the `target` candidates
/// with the largest radii are kept, returned in response order.
std::vector<Keypoint> anms(const std::vector<Keypoint> &candidates, size_t target);

struct KltOptions {
  int levels = 3;
  int window = 21;
  int max_iterations = 30;
  double epsilon = 0.01;
  /// Forward-backward round trip tolerance, pixels.
  double max_fb_error = 1.0;
  /// Minimum eigenvalue of the per-pixel structure tensor.
  double min_eigenvalue = 1e-4;
};

struct PointTrack {
  Eigen::Vector2d pixel = Eigen::Vector2d::Zero();
  bool ok = false;
};

/// Tracks pixels from prev into next. guesses (optional, same size as points)
/// seed the search in next. Includes the forward-backward check.
std::vector<PointTrack> track_points(const CartesianImage &prev, const CartesianImage &next,
                                     const std::vector<Eigen::Vector2d> &points,
                                     const std::vector<Eigen::Vector2d> &guesses = {},
                                     const KltOptions &options = {});

/// Tracks alive features; failures become kLost. If next_scan is given the
/// beam time of every survivor is recomputed from its new pixel.
std::vector<TrackedFeature> klt_track(const CartesianImage &prev, const CartesianImage &next,
                                      const std::vector<TrackedFeature> &features,
                                      const KltOptions &options = {},
                                      const PolarScan *next_scan = nullptr,
                                      const std::vector<Eigen::Vector2d> &predictions = {});

struct GridSpec {
  int rows = 8;
  int cols = 8;
};

/// New keypoints for cells whose live-feature count is below
/// target / (rows * cols), topping the pool back up to target.
std::vector<Keypoint> spawn_new_points(const CartesianImage &img,
                                       const std::vector<TrackedFeature> &alive, size_t target,
                                       const GridSpec &grid = {},
                                       const DetectorOptions &options = {});

}  // namespace radar_slam
