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
 * \file keyframe_map.hpp
 * \brief Keyframes, anchored map points and the keyframe pose graph.
 *
 * Every keyframe carries two poses: `tracking_pose`, the estimate the
 * tracker produced when the keyframe was created, and `pose`, the current
 * pose-graph estimate. Map points cache their position in the host
 * keyframe's tracking frame so that after a graph optimisation the world
 * position is re-established exactly as pose(host) * local.
 */
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "radar_slam/point_cloud.hpp"
#include "radar_slam/radar_geometry.hpp"
#include "radar_slam/se2.hpp"

namespace radar_slam {

struct MapPoint {
  int64_t id = -1;
  Eigen::Vector2d world_position = Eigen::Vector2d::Zero();
  int host_keyframe = -1;
  Eigen::Vector2d local_position = Eigen::Vector2d::Zero();
};

struct Keyframe {
  int id = -1;
  int frame_index = -1;
  Pose2 pose;
  Pose2 tracking_pose;
  Twist2 twist;
  double stamp = 0.0;
  std::shared_ptr<const PolarScan> scan;
  PointCloud2D cloud;
  PlaceDescriptor descriptor;
  double pca_ratio = 0.0;
  bool pca_accepted = false;
};

enum class EdgeKind { kOdometry, kLoop };

struct PoseGraphEdge {
  int from = -1;
  int to = -1;
  Pose2 measurement;
  Eigen::Matrix3d information = Eigen::Matrix3d::Identity();
  EdgeKind kind = EdgeKind::kOdometry;
};

class PoseGraph {
 public:
  void add_node(int id, const Pose2 &pose);
  bool has_node(int id) const { return nodes_.count(id) != 0; }
  const Pose2 &pose(int id) const;
  void set_pose(int id, const Pose2 &pose);
  const std::map<int, Pose2> &nodes() const { return nodes_; }

  /// Throws GraphError for a missing endpoint, InputError for a
  /// non-symmetric or non-positive-definite information matrix.
  void add_edge(const PoseGraphEdge &edge);
  const std::vector<PoseGraphEdge> &edges() const { return edges_; }
  size_t loop_edge_count() const;

  /// True when every node is reachable from the first one.
  bool connected() const;

  /// VERTEX_SE2 / EDGE_SE2 text (g2o layout).
  std::string to_g2o() const;

 private:
  std::map<int, Pose2> nodes_;
  std::vector<PoseGraphEdge> edges_;
};

/// Fallback odometry edge information.
Eigen::Matrix3d default_odometry_information();

/// Appends an odometry edge; both nodes must exist.
void add_odometry_edge(PoseGraph &graph, int from, int to, const Pose2 &measurement,
                       const Eigen::Matrix3d &information = default_odometry_information());

struct KeyframePolicy {
  double distance = 2.0;   // m
  double rotation = 0.2;   // rad
  int min_tracked = 30;
};

/// Translation > distance, |yaw| > rotation, or tracked < min_tracked.
bool should_create_keyframe(const Pose2 &current, int tracked_count, const Pose2 &last_keyframe_pose,
                            const KeyframePolicy &policy = {});

/// Recomputes every point's world position from its host's pose.
void reanchor_map_points(std::vector<MapPoint> &points, const std::map<int, Pose2> &host_poses);

/// Keyframes, map points and pose graph behind one mutex. The tracker appends;
/// the loop closer reads snapshots and applies corrections atomically.
class SlamMap {
 public:
  /// Adds a keyframe; its pose graph node starts at keyframe.pose.
  void add_keyframe(Keyframe keyframe);
  size_t keyframe_count() const;
  std::optional<Keyframe> keyframe(int id) const;
  std::vector<Keyframe> keyframes_snapshot() const;
  /// (id, pose, tracking_pose) of every keyframe, cheap to copy.
  std::map<int, std::pair<Pose2, Pose2>> keyframe_poses() const;

  void add_odometry_edge(int from, int to, const Pose2 &measurement, const Eigen::Matrix3d &information);
  void add_loop_edge(int from, int to, const Pose2 &measurement, const Eigen::Matrix3d &information);
  PoseGraph graph_snapshot() const;

  /// Stores a point placed in the tracking frame and hosts it on a keyframe.
  int64_t add_map_point(const Eigen::Vector2d &tracking_world, int host_keyframe);
  std::vector<MapPoint> map_points_snapshot() const;

  /// Writes optimised poses into keyframes and the graph, then re-anchors
  /// all map points, under one lock. Keyframes newer than the last optimised
  /// one receive that keyframe's correction.
  void apply_correction(const std::map<int, Pose2> &optimized);

  /// Max |world - pose(host) * local| over all points.
  double anchoring_error() const;

 private:
  mutable std::mutex mutex_;
  std::vector<Keyframe> keyframes_;
  std::map<int, size_t> index_;
  std::vector<MapPoint> points_;
  PoseGraph graph_;
  int64_t next_point_id_ = 0;
};

}  // namespace radar_slam
