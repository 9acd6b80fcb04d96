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
 * \file odometry.hpp
 * \brief Frame-to-map radar odometry.
 *
 * Each tracked feature owns a fixed world anchor placed when it is first
 * observed. For every new scan the tracker predicts feature pixels with a
 * constant-velocity model, tracks them with KLT, keeps the largest pairwise
 * consistent set, seeds the motion with an SVD fit and solves pose and twist
 * jointly with per-beam motion compensation.
 */
#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "radar_slam/config.hpp"
#include "radar_slam/features.hpp"
#include "radar_slam/motion_estimator.hpp"
#include "radar_slam/radar_geometry.hpp"
#include "radar_slam/se2.hpp"

namespace radar_slam {

struct NewAnchor {
  int64_t feature_id = -1;
  Eigen::Vector2d world = Eigen::Vector2d::Zero();
};

struct FrameResult {
  int index = 0;
  double stamp = 0.0;
  Pose2 pose;
  Twist2 twist;
  int tracked = 0;
  int inliers = 0;
  /// False when the solver had too few observations and the pose comes
  /// from the constant-velocity prediction.
  bool ok = true;
  int solver_iterations = 0;
  double final_cost = 0.0;
  Eigen::Matrix3d pose_information = Eigen::Matrix3d::Zero();
  /// Anchors placed while processing this frame.
  std::vector<NewAnchor> new_anchors;
};

class RadarOdometry {
 public:
  explicit RadarOdometry(const PipelineConfig &config);

  /// Throws InputError if stamps do not increase.
  FrameResult process(const PolarScan &scan);

  const std::vector<TrackedFeature> &features() const { return features_; }
  const Pose2 &pose() const { return pose_; }
  const Twist2 &twist() const { return twist_; }
  int frames_processed() const { return frame_; }

 private:
  struct Anchor {
    Eigen::Vector2d world;
    Eigen::Vector2d first_local;
    double first_time = 0.0;
    int first_frame = 0;
  };

  Eigen::Vector2d observed_local(const TrackedFeature &f) const;
  double effective_time(const TrackedFeature &f) const;
  std::vector<FeatureObservation> observations(const std::vector<int> &ids) const;
  void spawn(const CartesianImage &img, const PolarScan &scan, FrameResult &result);

  PipelineConfig config_;
  CartesianGeometry geom_;
  int frame_ = 0;
  double prev_stamp_ = 0.0;
  CartesianImage prev_image_;
  std::vector<TrackedFeature> features_;
  std::unordered_map<int64_t, Anchor> anchors_;
  int64_t next_id_ = 0;
  Pose2 pose_;
  Twist2 twist_;
};

}  // namespace radar_slam
