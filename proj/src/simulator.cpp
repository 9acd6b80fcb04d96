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

#include "radar_slam/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "radar_slam/errors.hpp"

namespace radar_slam {

void ReflectorWorld::validate() const {
  for (const auto &r : reflectors) {
    if (!r.position.allFinite()) throw InputError("reflector position must be finite");
    if (!(r.reflectivity >= 0.0) || !std::isfinite(r.reflectivity))
      throw InputError("reflector reflectivity must be finite and non-negative");
  }
}

std::mt19937_64 scan_rng(uint64_t seed, uint64_t scan_index) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(scan_index), static_cast<uint32_t>(scan_index >> 32)};
  return std::mt19937_64(seq);
}

double range_attenuation(double range, double attenuation_range) {
  if (attenuation_range <= 0.0) return 1.0;
  return 1.0 / (1.0 + std::max(0.0, range) / attenuation_range);
}

void deposit_return(Eigen::Ref<Eigen::RowVectorXd> row, double range_bins, double energy, double sigma_bins) {
  if (!(sigma_bins > 0.0)) throw InputError("range blur sigma must be positive");
  const int half = static_cast<int>(std::ceil(4.0 * sigma_bins));
  const int centre = static_cast<int>(std::lround(range_bins));
  std::vector<double> w(2 * half + 1);
  double sum = 0.0;
  for (int k = -half; k <= half; ++k) {
    const double d = (centre + k - range_bins) / sigma_bins;
    w[k + half] = std::exp(-0.5 * d * d);
    sum += w[k + half];
  }
  for (int k = -half; k <= half; ++k) {
    const int b = centre + k;
    if (b < 0 || b >= row.size()) continue;
    row(b) += energy * w[k + half] / sum;
  }
}

PolarScan render_scan(const ReflectorWorld &world, const Pose2 &centre, const Twist2 &twist, double stamp,
                      uint64_t scan_index, const SimulatorConfig &config) {
  if (config.n_azimuths <= 0 || config.n_range_bins <= 0 || !(config.range_resolution > 0.0) ||
      !(config.scan_period > 0.0))
    throw InputError("simulator dimensions must be positive");
  if (!twist.finite()) throw InputError("simulator twist must be finite");
  const int n = config.n_azimuths;
  const double max_range = config.n_range_bins * config.range_resolution;
  const double row_angle = 2.0 * std::numbers::pi / n;
  const double beam_reach = 3.0 * config.beam_sigma_rows;

  // Reflectors that can be seen at any time during the scan.
  const double slack = twist.vector().head<2>().norm() * config.scan_period + 4.0 * config.range_sigma_bins *
                                                                                  config.range_resolution;
  std::vector<const Reflector *> visible;
  for (const auto &r : world.reflectors)
    if ((r.position - centre.translation()).norm() < max_range + slack && r.reflectivity > 0.0)
      visible.push_back(&r);

  PolarScan scan;
  scan.power = Grid::Zero(n, config.n_range_bins);
  scan.range_resolution = config.range_resolution;
  scan.scan_period = config.scan_period;
  scan.stamp = stamp;

  Grid ghosts = Grid::Zero(n, config.n_range_bins);
  for (int a = 0; a < n; ++a) {
    const double t = (a - n / 2.0) / n * config.scan_period;
    const Pose2 inv = (centre * exp_twist(twist, t)).inverse();
    const double theta = -a * row_angle;
    for (const Reflector *r : visible) {
      const Eigen::Vector2d q = inv.act(r->position);
      const double range = q.norm();
      if (range >= max_range || range < config.range_resolution) continue;
      const double rows = normalize_angle(std::atan2(q.y(), q.x()) - theta) / row_angle;
      if (std::abs(rows) > beam_reach) continue;
      const double gain =
          config.beam_sigma_rows > 0.0 ? std::exp(-0.5 * rows * rows / (config.beam_sigma_rows * config.beam_sigma_rows))
                                       : 1.0;
      const double energy = r->reflectivity * range_attenuation(range, config.attenuation_range) * gain;
      deposit_return(scan.power.row(a), range / config.range_resolution, energy, config.range_sigma_bins);
      if (config.multipath_gain > 0.0 && 2.0 * range < max_range)
        deposit_return(ghosts.row(a), 2.0 * range / config.range_resolution, energy * config.multipath_gain,
                       config.range_sigma_bins);
    }
  }
  scan.power += ghosts;

  auto rng = scan_rng(config.seed, scan_index);
  std::normal_distribution<double> speckle(0.0, config.speckle_std > 0.0 ? config.speckle_std : 1.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < config.n_range_bins; ++b) {
      double v = scan.power(a, b);
      if (config.speckle_std > 0.0) v += speckle(rng);
      v = std::clamp(v, 0.0, config.saturation);
      scan.power(a, b) = config.quantize ? std::round(v) : v;
    }
  return scan;
}

std::vector<SimFrame> frames_from_twists(const Pose2 &start, const std::vector<Twist2> &twists, double dt,
                                         double t0) {
  if (!(dt > 0.0)) throw InputError("frame period must be positive");
  std::vector<SimFrame> frames;
  frames.reserve(twists.size());
  Pose2 pose = start;
  for (size_t k = 0; k < twists.size(); ++k) {
    frames.push_back({t0 + k * dt, pose, twists[k]});
    pose = pose * exp_twist(twists[k], dt);
  }
  return frames;
}

std::vector<SimFrame> frames_from_trajectory(const Trajectory &trajectory) {
  std::vector<SimFrame> frames;
  for (size_t k = 0; k < trajectory.size(); ++k) {
    if (k > 0 && !(trajectory[k].stamp > trajectory[k - 1].stamp))
      throw InputError("trajectory stamps must strictly increase (index " + std::to_string(k) + ")");
    frames.push_back({trajectory[k].stamp, trajectory[k].pose, Twist2()});
  }
  for (size_t k = 0; k + 1 < frames.size(); ++k)
    frames[k].twist = Twist2(log_pose(frames[k].pose.inverse() * frames[k + 1].pose) /
                             (frames[k + 1].stamp - frames[k].stamp));
  if (frames.size() > 1) frames.back().twist = frames[frames.size() - 2].twist;
  return frames;
}

std::vector<Twist2> square_loop_twists(double side, double speed, double turn_rate, double dt) {
  if (!(side > 0.0) || !(speed > 0.0) || !(turn_rate > 0.0) || !(dt > 0.0))
    throw InputError("square loop parameters must be positive");
  const int turn_steps = static_cast<int>(std::ceil(std::numbers::pi / 2.0 / (turn_rate * dt)));
  const double rate = std::numbers::pi / 2.0 / (turn_steps * dt);
  // Each turn step advances speed * dt along the heading held during that step.
  Eigen::Vector2d turn_span = Eigen::Vector2d::Zero();
  for (int k = 0; k < turn_steps; ++k) turn_span += rotation_matrix(k * rate * dt) * Eigen::Vector2d(speed * dt, 0);
  const double straight = side - turn_span.x() - turn_span.y();
  if (straight <= 0.0) throw InputError("square side too short for the turn radius");
  const int straight_steps = std::max(1, static_cast<int>(std::lround(straight / (speed * dt))));
  const double straight_speed = straight / (straight_steps * dt);
  std::vector<Twist2> twists;
  for (int corner = 0; corner < 4; ++corner) {
    for (int k = 0; k < straight_steps; ++k) twists.emplace_back(straight_speed, 0.0, 0.0);
    for (int k = 0; k < turn_steps; ++k) twists.emplace_back(speed, 0.0, rate);
  }
  return twists;
}

namespace {

void add_clump(ReflectorWorld &world, const Eigen::Vector2d &centre, std::mt19937_64 &rng) {
  std::uniform_int_distribution<int> count(3, 6);
  std::uniform_real_distribution<double> offset(-0.3, 0.3);
  std::uniform_real_distribution<double> refl(120.0, 255.0);
  const int k = count(rng);
  for (int i = 0; i < k; ++i) world.reflectors.push_back({centre + Eigen::Vector2d(offset(rng), offset(rng)), refl(rng)});
}

}  // namespace

ReflectorWorld make_clutter_world(const Eigen::Vector2d &lo, const Eigen::Vector2d &hi, int n_clumps,
                                  uint64_t seed) {
  if (!(hi.array() > lo.array()).all() || n_clumps < 0) throw InputError("invalid clutter world bounds");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(lo.x(), hi.x()), uy(lo.y(), hi.y());
  ReflectorWorld world;
  for (int i = 0; i < n_clumps; ++i) add_clump(world, {ux(rng), uy(rng)}, rng);
  return world;
}

ReflectorWorld make_corridor_world(double length, double half_width, uint64_t seed) {
  if (!(length > 0.0) || !(half_width > 0.0)) throw InputError("invalid corridor dimensions");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> refl(80.0, 160.0);
  ReflectorWorld world;
  for (double x = -20.0; x <= length + 20.0; x += 0.1) {
    world.reflectors.push_back({{x, half_width}, refl(rng)});
    world.reflectors.push_back({{x, -half_width}, refl(rng)});
  }
  std::uniform_real_distribution<double> ux(-20.0, length + 20.0), uy(-half_width + 1.0, half_width - 1.0);
  const int clumps = static_cast<int>(length / 10.0);
  for (int i = 0; i < clumps; ++i) add_clump(world, {ux(rng), uy(rng)}, rng);
  return world;
}

std::vector<PolarScan> render_sequence(const ReflectorWorld &world, const std::vector<SimFrame> &frames,
                                       const SimulatorConfig &config) {
  world.validate();
  for (size_t k = 1; k < frames.size(); ++k)
    if (!(frames[k].stamp > frames[k - 1].stamp))
      throw InputError("frame stamps must strictly increase (index " + std::to_string(k) + ")");
  std::vector<PolarScan> scans;
  scans.reserve(frames.size());
  for (size_t k = 0; k < frames.size(); ++k)
    scans.push_back(render_scan(world, frames[k].pose, frames[k].twist, frames[k].stamp, k, config));
  return scans;
}

Trajectory ground_truth(const std::vector<SimFrame> &frames) {
  Trajectory gt;
  for (const auto &f : frames) gt.push_back({f.stamp, f.pose});
  return gt;
}

void generate_sequence(const std::filesystem::path &dir, const ReflectorWorld &world,
                       const std::vector<SimFrame> &frames, const SimulatorConfig &config) {
  const auto scans = render_sequence(world, frames, config);
  std::filesystem::create_directories(dir);
  std::vector<std::string> names;
  for (size_t k = 0; k < scans.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof(name), "scan_%06zu.rps", k);
    write_polar_scan(dir / name, scans[k]);
    names.emplace_back(name);
  }
  write_manifest(dir, names);
  write_trajectory(dir / kGroundTruthName, ground_truth(frames));
}

}  // namespace radar_slam
