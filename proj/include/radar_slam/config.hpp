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
 * \file config.hpp
 * \brief Pipeline parameters and their `key = value` text form.
 *
 * Lines starting with '#' and blank lines are ignored. Unknown keys and
 * unparsable values raise InputError naming the offending line.
 */
#pragma once

#include <filesystem>
#include <string>

#include <Eigen/Core>

#include "radar_slam/features.hpp"
#include "radar_slam/keyframe_map.hpp"
#include "radar_slam/loop_closure.hpp"
#include "radar_slam/motion_estimator.hpp"
#include "radar_slam/pose_graph.hpp"

namespace radar_slam {

struct PipelineConfig {
  // Cartesian image.
  double cartesian_resolution = 0.25;  // m / px
  int cartesian_size = 700;            // px, square
  double max_range = kDefaultMaxRange;

  // Front end.
  DetectorOptions detector;
  KltOptions klt;
  GridSpec grid;
  int feature_target = 60;
  int respawn_below = 60;
  double clique_threshold = 3.0;  // px
  /// Per-beam timestamps in the residual; false treats every beam as t = 0.
  bool beam_time_compensation = true;
  /// Features whose post-solve residual exceeds this are dropped, m.
  double max_feature_residual = 2.0;
  EstimatorConfig estimator;

  // Back end.
  KeyframePolicy keyframe;
  bool loop_closure = true;
  LoopClosureConfig loop;
  PoseGraphOptions graph;
  Eigen::Matrix3d odometry_information = default_odometry_information();
  /// Yaw (rad) added to every keyframe-to-keyframe odometry measurement.
  double odometry_yaw_bias = 0.0;

  CartesianGeometry geometry() const { return {cartesian_size, cartesian_size, cartesian_resolution}; }
  /// Throws InputError on inconsistent values.
  void validate() const;
};

/// Sets one parameter from its text value.
void set_config_value(PipelineConfig &config, const std::string &key, const std::string &value);

PipelineConfig parse_config(const std::string &text);
PipelineConfig load_config(const std::filesystem::path &path);

/// Every parameter as `key = value` lines; parse_config(dump_config(c))
/// reproduces c.
std::string dump_config(const PipelineConfig &config);

}  // namespace radar_slam
