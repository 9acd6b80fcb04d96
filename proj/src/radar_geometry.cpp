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

#include "radar_slam/radar_geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "radar_slam/errors.hpp"

namespace radar_slam {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double interpolate_stamp(const std::vector<double> &stamps, double a) {
  const int n = static_cast<int>(stamps.size());
  int i0 = static_cast<int>(std::floor(a));
  if (i0 < 0) i0 = 0;
  if (i0 > n - 2) i0 = n - 2;
  const double f = a - i0;
  return stamps[i0] + f * (stamps[i0 + 1] - stamps[i0]);
}

}  // namespace

void PolarScan::validate() const {
  if (n_azimuths() < 4) throw InputError("polar scan needs at least 4 azimuths");
  if (n_range_bins() < 1) throw InputError("polar scan needs at least 1 range bin");
  if (!(range_resolution > 0.0)) throw InputError("range resolution must be positive");
  if (!(scan_period > 0.0)) throw InputError("scan period must be positive");
  if (!power.allFinite()) throw InputError("polar scan power must be finite");
  if ((power.array() < 0.0).any()) throw InputError("polar scan power must be non-negative");
  if (!azimuth_stamps.empty()) {
    if (static_cast<int>(azimuth_stamps.size()) != n_azimuths())
      throw InputError("azimuth stamp count does not match azimuth count");
    for (size_t i = 1; i < azimuth_stamps.size(); ++i)
      if (!(azimuth_stamps[i] > azimuth_stamps[i - 1]))
        throw InputError("azimuth stamps must be strictly increasing");
    if (azimuth_stamps.back() - azimuth_stamps.front() > scan_period + 1e-12)
      throw InputError("azimuth stamps span more than one scan period");
  }
}

CartesianGeometry CartesianGeometry::for_range(double max_range, double resolution) {
  if (!(resolution > 0.0) || !(max_range > 0.0))
    throw InputError("cartesian geometry needs positive range and resolution");
  const int half = static_cast<int>(std::ceil(max_range / resolution));
  return {2 * half, 2 * half, resolution};
}

bool CartesianImage::contains(const Eigen::Vector2d &pixel, double margin) const {
  return pixel.x() >= margin && pixel.y() >= margin && pixel.x() <= width() - 1 - margin &&
         pixel.y() <= height() - 1 - margin;
}

Eigen::Vector3d polar_point_to_metric(const PolarDetection &det, const PolarScan &scan) {
  if (det.azimuth_index < 0 || det.azimuth_index >= scan.n_azimuths() || det.range_bin < 0.0 ||
      det.range_bin > scan.n_range_bins() - 1)
    throw BoundsError("polar detection (" + std::to_string(det.azimuth_index) + ", " +
                      std::to_string(det.range_bin) + ") outside scan");
  const double theta = -det.azimuth_index * kTwoPi / scan.n_azimuths();
  const double range = scan.range_resolution * det.range_bin;
  return {range * std::cos(theta), range * std::sin(theta), 1.0};
}

Eigen::Vector2d metric_to_pixel(const Eigen::Vector2d &p, const CartesianGeometry &geom) {
  return {geom.width / 2.0 - p.y() / geom.resolution, geom.height / 2.0 - p.x() / geom.resolution};
}

Eigen::Vector2d metric_to_pixel(const Eigen::Vector3d &p, const CartesianGeometry &geom) {
  return metric_to_pixel(Eigen::Vector2d(p.x() / p.z(), p.y() / p.z()), geom);
}

Eigen::Vector2d pixel_to_metric(const Eigen::Vector2d &pixel, const CartesianGeometry &geom) {
  return {(geom.height / 2.0 - pixel.y()) * geom.resolution,
          (geom.width / 2.0 - pixel.x()) * geom.resolution};
}

CartesianImage polar_to_cartesian(const PolarScan &scan, const CartesianGeometry &geom,
                                  double max_range) {
  if (geom.width < 2 || geom.height < 2 || geom.width % 2 || geom.height % 2)
    throw InputError("cartesian image dimensions must be even and >= 2");
  if (!(geom.resolution > 0.0)) throw InputError("cartesian resolution must be positive");

  const int n_az = scan.n_azimuths();
  const int n_bins = scan.n_range_bins();
  const double max_bin = std::min(max_range / scan.range_resolution, n_bins - 1.0);
  const double az_scale = n_az / kTwoPi;

  CartesianImage img;
  img.intensity = Grid::Zero(geom.height, geom.width);
  img.resolution = geom.resolution;
  img.stamp = scan.stamp;

  for (int v = 0; v < geom.height; ++v) {
    const double x = (geom.height / 2.0 - v) * geom.resolution;
    for (int u = 0; u < geom.width; ++u) {
      const double y = (geom.width / 2.0 - u) * geom.resolution;
      const double r = std::hypot(x, y) / scan.range_resolution;
      if (r < 1.0 || r > max_bin) continue;
      double a = -std::atan2(y, x) * az_scale;
      if (a < 0.0) a += n_az;
      if (a >= n_az) a -= n_az;
      const int a0 = static_cast<int>(a);
      const int a1 = (a0 + 1) % n_az;
      const double fa = a - a0;
      int r0 = static_cast<int>(r);
      if (r0 >= n_bins - 1) r0 = n_bins - 2;
      const double fr = r - r0;
      const double top = (1.0 - fr) * scan.power(a0, r0) + fr * scan.power(a0, r0 + 1);
      const double bottom = (1.0 - fr) * scan.power(a1, r0) + fr * scan.power(a1, r0 + 1);
      img.intensity(v, u) = (1.0 - fa) * top + fa * bottom;
    }
  }
  return img;
}

CartesianImage polar_to_cartesian(const PolarScan &scan, int width, int height,
                                  double resolution, double max_range) {
  return polar_to_cartesian(scan, CartesianGeometry{width, height, resolution}, max_range);
}

double metric_azimuth_index(const Eigen::Vector2d &p, int n_azimuths) {
  double a = -std::atan2(p.y(), p.x()) * n_azimuths / kTwoPi;
  if (a < 0.0) a += n_azimuths;
  if (a >= n_azimuths) a -= n_azimuths;
  return a;
}

double azimuth_beam_time(double azimuth_index, const PolarScan &scan) {
  const int n = scan.n_azimuths();
  if (scan.azimuth_stamps.empty()) return (azimuth_index - n / 2.0) / n * scan.scan_period;
  const double centre = interpolate_stamp(scan.azimuth_stamps, n / 2.0);
  return interpolate_stamp(scan.azimuth_stamps, azimuth_index) - centre;
}

double pixel_beam_time(const Eigen::Vector2d &pixel, const CartesianGeometry &geom,
                       const PolarScan &scan) {
  const Eigen::Vector2d p = pixel_to_metric(pixel, geom);
  if (p.x() == 0.0 && p.y() == 0.0)
    throw DegenerateError("azimuth undefined at the image centre");
  return azimuth_beam_time(metric_azimuth_index(p, scan.n_azimuths()), scan);
}

}  // namespace radar_slam
