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
 * \file loop_closure.hpp
 * \brief Place recognition and geometric verification between keyframes.
 *
 * Each keyframe's polar scan is reduced to a sparse point cloud (strong
 * per-azimuth peaks), summarised by a rotation-invariant descriptor and
 * screened by a PCA elongation gate. Candidate matches are verified by
 * aligning the images (PCA rotation, KLT, consistency clique, SVD) and
 * refining with point-to-point ICP.
 */
#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "radar_slam/keyframe_map.hpp"
#include "radar_slam/point_cloud.hpp"
#include "radar_slam/radar_geometry.hpp"
#include "radar_slam/se2.hpp"

namespace radar_slam {

struct LoopClosureConfig {
  // Point cloud extraction.
  double peak_prominence = 8.0;
  int peak_distance = 5;  // bins
  double max_range = kDefaultMaxRange;
  // Descriptor.
  int rings = 8;
  int sectors = 16;
  double descriptor_radius = kDefaultMaxRange;
  // Candidate search.
  double pca_ratio_max = 3.0;
  int temporal_gap = 50;  // keyframes
  double descriptor_threshold = 0.15;
  // Verification.
  int verification_keypoints = 200;
  /// Coarse rotation sweep scored by cloud overlap; its best angles join the
  /// two principal-axis hypotheses. A step <= 0 disables the sweep.
  double rotation_sweep_step = 0.0349;  // rad
  int rotation_sweep_hypotheses = 2;
  double clique_threshold = 3.0;  // pixels
  int icp_max_iterations = 50;
  double icp_tolerance = 1e-4;  // m
  double icp_inlier_distance = 2.0;  // m
  double max_mean_residual = 1.0;    // m
  double min_inlier_fraction = 0.5;
  Eigen::Matrix3d base_information = Eigen::Vector3d(100.0, 100.0, 400.0).asDiagonal();
};

/// Peak indices of a 1-D signal: local maxima (plateau centres) with
/// prominence >= min_prominence, then thinned so that kept peaks are at
/// least min_distance apart, higher peaks first.
std::vector<int> find_peaks(const Eigen::Ref<const Eigen::RowVectorXd> &signal, double min_prominence,
                            int min_distance);

/// Per azimuth, peaks whose power is >= mean + std of that row's peak
/// powers. With a twist, each point is motion-compensated to the scan centre.
PointCloud2D extract_point_cloud(const PolarScan &scan, const LoopClosureConfig &config = {},
                                 const Twist2 *twist = nullptr);

struct PcaSummary {
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  /// Direction of the principal axis, radians.
  double principal_angle = 0.0;
  /// gamma_1 / gamma_2, +inf for collinear or tiny clouds.
  double ratio = 0.0;
  bool accepted = false;
};

PcaSummary pca_gate(const PointCloud2D &cloud, double max_ratio = 3.0);

PlaceDescriptor compute_descriptor(const PointCloud2D &cloud, const LoopClosureConfig &config = {});

/// L2 distance; +inf if either descriptor is degenerate.
double descriptor_distance(const PlaceDescriptor &a, const PlaceDescriptor &b);

struct LoopCandidate {
  int query = -1;
  int match = -1;
  double distance = 0.0;
};

/// Nearest PCA-accepted keyframe with id < query.id - temporal_gap whose
/// descriptor distance is below the threshold.
std::optional<LoopCandidate> find_loop_candidate(const Keyframe &query, const std::vector<Keyframe> &history,
                                                 const LoopClosureConfig &config = {});

/// Rotates an image about its centre: out(p) = in(R(-angle) p) in metric
/// coordinates.
CartesianImage rotate_image(const CartesianImage &image, double angle);

struct IcpResult {
  Pose2 transform;
  double mean_residual = 0.0;   // mean inlier distance, m
  double inlier_fraction = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Truncated mean squared distance before each update.
  std::vector<double> cost_history;
};

/// Point-to-point ICP aligning source into target (target ~ T * source).
IcpResult icp(const PointCloud2D &source, const PointCloud2D &target, const Pose2 &initial,
              const LoopClosureConfig &config = {});

struct LoopVerification {
  bool accepted = false;
  /// T_{l,j}: maps query-frame points into the match frame.
  Pose2 relative;
  Eigen::Matrix3d information = Eigen::Matrix3d::Identity();
  double mean_residual = 0.0;
  double inlier_fraction = 0.0;
  int clique_size = 0;
  double pca_rotation = 0.0;
};

/// Rotations (best first, at least three steps apart) whose centroid-aligned
/// overlap between the clouds is largest.
std::vector<double> sweep_rotations(const PointCloud2D &query, const PointCloud2D &match,
                                    const LoopClosureConfig &config = {});

LoopVerification verify_and_estimate(const Keyframe &query, const Keyframe &match, const CartesianGeometry &geom,
                                     const LoopClosureConfig &config = {});

}  // namespace radar_slam
