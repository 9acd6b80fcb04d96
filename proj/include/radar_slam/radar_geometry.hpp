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
 * \file radar_geometry.hpp
 * \brief Polar scans, Cartesian radar images and the mappings between them.
 *
 * Conventions:
 *  - Azimuth row a points along theta = -a * 2 pi / N (the sensor sweeps
 *    clockwise), row 0 along +x.
 *  - Metric frame: x forward, y left. Pixel (u, v) = (column, row) with
 *    u = w/2 - y / mu_c and v = h/2 - x / mu_c, so range 0 is the image
 *    centre (w/2, h/2).
 *  - Row a is fired at t = (a - N/2) / N * scan_period relative to the
 *    central beam; row 0 starts the sweep at -scan_period / 2.
 */
#pragma once

#include <vector>

#include <Eigen/Core>

namespace radar_slam {

using Grid = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Maximum range kept when forming Cartesian images, meters.
inline constexpr double kDefaultMaxRange = 87.5;

struct PolarScan {
  /// n_azimuths x n_range_bins, 0-255 equivalent return power.
  Grid power;
  double range_resolution = 0.0;  // m / bin
  double scan_period = 0.25;      // s
  double stamp = 0.0;             // s, time of the central beam
  /// Optional absolute per-row stamps (seconds). Empty when absent.
  std::vector<double> azimuth_stamps;

  int n_azimuths() const { return static_cast<int>(power.rows()); }
  int n_range_bins() const { return static_cast<int>(power.cols()); }

  /// Throws InputError if any invariant is violated.
  void validate() const;
};

struct CartesianGeometry {
  int width = 0;
  int height = 0;
  double resolution = 0.0;  // m / px

  /// 2 * ceil(max_range / resolution) on each side.
  static CartesianGeometry for_range(double max_range, double resolution);
};

struct CartesianImage {
  Grid intensity;  // height x width, indexed (v, u)
  double resolution = 0.0;
  double stamp = 0.0;

  int width() const { return static_cast<int>(intensity.cols()); }
  int height() const { return static_cast<int>(intensity.rows()); }
  CartesianGeometry geometry() const { return {width(), height(), resolution}; }
  bool contains(const Eigen::Vector2d &pixel, double margin = 0.0) const;
};

struct PolarDetection {
  int azimuth_index = 0;
  double range_bin = 0.0;
};

/// Homogeneous metric point [x, y, 1] of a polar detection.
Eigen::Vector3d polar_point_to_metric(const PolarDetection &det, const PolarScan &scan);

/// Metric (x, y) of a homogeneous point to pixel (u, v).
Eigen::Vector2d metric_to_pixel(const Eigen::Vector3d &p, const CartesianGeometry &geom);
Eigen::Vector2d metric_to_pixel(const Eigen::Vector2d &p, const CartesianGeometry &geom);

/// Pixel (u, v) to metric (x, y).
Eigen::Vector2d pixel_to_metric(const Eigen::Vector2d &pixel, const CartesianGeometry &geom);

/// Bilinear polar to Cartesian conversion. Pixels farther than max_range,
/// beyond the last range bin or inside range bin 0 are set to zero.
CartesianImage polar_to_cartesian(const PolarScan &scan, int width, int height,
                                  double resolution, double max_range = kDefaultMaxRange);
CartesianImage polar_to_cartesian(const PolarScan &scan, const CartesianGeometry &geom,
                                  double max_range = kDefaultMaxRange);

/// Fractional azimuth index in [0, N) of a metric direction.
double metric_azimuth_index(const Eigen::Vector2d &p, int n_azimuths);

/// Beam time of a fractional azimuth index relative to the central beam.
double azimuth_beam_time(double azimuth_index, const PolarScan &scan);

/// Beam time of the azimuth through a Cartesian pixel, in
/// [-scan_period/2, scan_period/2). Throws DegenerateError at the image centre.
double pixel_beam_time(const Eigen::Vector2d &pixel, const CartesianGeometry &geom,
                       const PolarScan &scan);

}  // namespace radar_slam
