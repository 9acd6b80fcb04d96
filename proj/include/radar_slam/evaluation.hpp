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
 * \file evaluation.hpp
 * \brief Trajectory metrics: KITTI-style segment drift, absolute trajectory
 * error after SE(2) alignment, and sequence completion.
 */
#pragma once

#include <string>
#include <vector>

#include "radar_slam/io.hpp"
#include "radar_slam/se2.hpp"

namespace radar_slam {

struct AssociatedPair {
  Pose2 estimate;
  Pose2 reference;
  double stamp = 0.0;
};

/// Matches every estimate to the nearest ground-truth stamp within half the
/// median ground-truth spacing. Throws InputError naming how many poses
/// could not be matched.
std::vector<AssociatedPair> associate(const Trajectory &estimate, const Trajectory &ground_truth);

struct RelativeError {
  double translation_percent = 0.0;    // %
  double rotation_deg_per_100m = 0.0;  // deg / 100 m
  int segments = 0;
};

/// Mean over start frames and lengths {100, 200, ..., 800} m of the
/// relative pose error between segment endpoints. Throws InputError if the
/// path is shorter than the smallest segment.
RelativeError relative_error(const std::vector<AssociatedPair> &pairs,
                             const std::vector<double> &lengths = {100, 200, 300, 400, 500, 600, 700, 800});

/// Least-squares rigid alignment estimate -> reference.
Pose2 align_trajectories(const std::vector<AssociatedPair> &pairs);

/// RMSE of translation after alignment.
double absolute_trajectory_error(const std::vector<AssociatedPair> &pairs);

/// completed / total * 100. Throws InputError if total <= 0 or completed is
/// outside [0, total].
double completion_percentage(int completed_frames, int total_frames);

std::string format_report(const RelativeError &rel, double ate, double completion);

}  // namespace radar_slam
