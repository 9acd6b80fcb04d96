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

#include "radar_slam/keyframe_map.hpp"

#include <cmath>
#include <iomanip>
#include <queue>
#include <set>
#include <sstream>

#include <Eigen/Cholesky>

#include "radar_slam/errors.hpp"

namespace radar_slam {

void PoseGraph::add_node(int id, const Pose2 &pose) {
  if (has_node(id)) throw GraphError("duplicate pose graph node " + std::to_string(id));
  nodes_.emplace(id, pose);
}

const Pose2 &PoseGraph::pose(int id) const {
  const auto it = nodes_.find(id);
  if (it == nodes_.end()) throw GraphError("unknown pose graph node " + std::to_string(id));
  return it->second;
}

void PoseGraph::set_pose(int id, const Pose2 &pose) {
  const auto it = nodes_.find(id);
  if (it == nodes_.end()) throw GraphError("unknown pose graph node " + std::to_string(id));
  it->second = pose;
}

void PoseGraph::add_edge(const PoseGraphEdge &edge) {
  if (!has_node(edge.from) || !has_node(edge.to))
    throw GraphError("edge " + std::to_string(edge.from) + "->" + std::to_string(edge.to) +
                     " references a missing node");
  if (edge.from == edge.to) throw GraphError("self edge on node " + std::to_string(edge.from));
  const Eigen::Matrix3d &info = edge.information;
  if (!info.allFinite() || (info - info.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + info.cwiseAbs().maxCoeff()))
    throw InputError("edge information must be finite and symmetric");
  Eigen::LLT<Eigen::Matrix3d> llt(info);
  if (llt.info() != Eigen::Success) throw InputError("edge information must be positive definite");
  edges_.push_back(edge);
}

size_t PoseGraph::loop_edge_count() const {
  size_t n = 0;
  for (const auto &e : edges_) n += e.kind == EdgeKind::kLoop ? 1 : 0;
  return n;
}

bool PoseGraph::connected() const {
  if (nodes_.empty()) return true;
  std::map<int, std::vector<int>> adj;
  for (const auto &e : edges_) {
    adj[e.from].push_back(e.to);
    adj[e.to].push_back(e.from);
  }
  std::set<int> seen{nodes_.begin()->first};
  std::queue<int> todo;
  todo.push(nodes_.begin()->first);
  while (!todo.empty()) {
    const int v = todo.front();
    todo.pop();
    for (int u : adj[v])
      if (seen.insert(u).second) todo.push(u);
  }
  return seen.size() == nodes_.size();
}

std::string PoseGraph::to_g2o() const {
  std::ostringstream ss;
  ss << std::setprecision(17);
  for (const auto &[id, p] : nodes_)
    ss << "VERTEX_SE2 " << id << ' ' << p.x() << ' ' << p.y() << ' ' << p.angle() << '\n';
  for (const auto &e : edges_) {
    const auto &m = e.measurement;
    const auto &i = e.information;
    ss << "EDGE_SE2 " << e.from << ' ' << e.to << ' ' << m.x() << ' ' << m.y() << ' ' << m.angle() << ' '
       << i(0, 0) << ' ' << i(0, 1) << ' ' << i(0, 2) << ' ' << i(1, 1) << ' ' << i(1, 2) << ' ' << i(2, 2)
       << '\n';
  }
  return ss.str();
}

Eigen::Matrix3d default_odometry_information() {
  return Eigen::Vector3d(100.0, 100.0, 400.0).asDiagonal();
}

void add_odometry_edge(PoseGraph &graph, int from, int to, const Pose2 &measurement,
                       const Eigen::Matrix3d &information) {
  graph.add_edge({from, to, measurement, information, EdgeKind::kOdometry});
}

bool should_create_keyframe(const Pose2 &current, int tracked_count, const Pose2 &last_keyframe_pose,
                            const KeyframePolicy &policy) {
  const Pose2 rel = last_keyframe_pose.inverse() * current;
  return rel.translation().norm() > policy.distance || std::abs(rel.angle()) > policy.rotation ||
         tracked_count < policy.min_tracked;
}

void reanchor_map_points(std::vector<MapPoint> &points, const std::map<int, Pose2> &host_poses) {
  for (auto &p : points) {
    const auto it = host_poses.find(p.host_keyframe);
    if (it == host_poses.end())
      throw GraphError("map point " + std::to_string(p.id) + " has no host keyframe pose");
    p.world_position = it->second.act(p.local_position);
  }
}

void SlamMap::add_keyframe(Keyframe keyframe) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (index_.count(keyframe.id)) throw GraphError("duplicate keyframe " + std::to_string(keyframe.id));
  graph_.add_node(keyframe.id, keyframe.pose);
  index_[keyframe.id] = keyframes_.size();
  keyframes_.push_back(std::move(keyframe));
}

size_t SlamMap::keyframe_count() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return keyframes_.size();
}

std::optional<Keyframe> SlamMap::keyframe(int id) const {
  std::lock_guard<std::mutex> lock(mutex_);
  const auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return keyframes_[it->second];
}

std::vector<Keyframe> SlamMap::keyframes_snapshot() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return keyframes_;
}

std::map<int, std::pair<Pose2, Pose2>> SlamMap::keyframe_poses() const {
  std::lock_guard<std::mutex> lock(mutex_);
  std::map<int, std::pair<Pose2, Pose2>> out;
  for (const auto &kf : keyframes_) out.emplace(kf.id, std::make_pair(kf.pose, kf.tracking_pose));
  return out;
}

void SlamMap::add_odometry_edge(int from, int to, const Pose2 &measurement, const Eigen::Matrix3d &information) {
  std::lock_guard<std::mutex> lock(mutex_);
  radar_slam::add_odometry_edge(graph_, from, to, measurement, information);
}

void SlamMap::add_loop_edge(int from, int to, const Pose2 &measurement, const Eigen::Matrix3d &information) {
  std::lock_guard<std::mutex> lock(mutex_);
  graph_.add_edge({from, to, measurement, information, EdgeKind::kLoop});
}

PoseGraph SlamMap::graph_snapshot() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return graph_;
}

int64_t SlamMap::add_map_point(const Eigen::Vector2d &tracking_world, int host_keyframe) {
  std::lock_guard<std::mutex> lock(mutex_);
  const auto it = index_.find(host_keyframe);
  if (it == index_.end()) throw GraphError("unknown host keyframe " + std::to_string(host_keyframe));
  const Keyframe &host = keyframes_[it->second];
  MapPoint p;
  p.id = next_point_id_++;
  p.host_keyframe = host_keyframe;
  p.local_position = host.tracking_pose.inverse().act(tracking_world);
  p.world_position = host.pose.act(p.local_position);
  points_.push_back(p);
  return p.id;
}

std::vector<MapPoint> SlamMap::map_points_snapshot() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return points_;
}

void SlamMap::apply_correction(const std::map<int, Pose2> &optimized) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (optimized.empty()) return;
  const int newest = optimized.rbegin()->first;
  const auto newest_it = index_.find(newest);
  const Pose2 correction = newest_it == index_.end()
                               ? Pose2()
                               : optimized.rbegin()->second * keyframes_[newest_it->second].pose.inverse();
  for (auto &kf : keyframes_)
    if (kf.id > newest) {
      kf.pose = correction * kf.pose;
      graph_.set_pose(kf.id, kf.pose);
    }
  for (const auto &[id, pose] : optimized) {
    const auto it = index_.find(id);
    if (it == index_.end()) continue;
    keyframes_[it->second].pose = pose;
    graph_.set_pose(id, pose);
  }
  std::map<int, Pose2> hosts;
  for (const auto &kf : keyframes_) hosts.emplace(kf.id, kf.pose);
  reanchor_map_points(points_, hosts);
}

double SlamMap::anchoring_error() const {
  std::lock_guard<std::mutex> lock(mutex_);
  double worst = 0.0;
  for (const auto &p : points_) {
    const Keyframe &host = keyframes_[index_.at(p.host_keyframe)];
    worst = std::max(worst, (p.world_position - host.pose.act(p.local_position)).norm());
  }
  return worst;
}

}  // namespace radar_slam
