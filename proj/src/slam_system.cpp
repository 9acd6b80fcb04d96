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

#include "radar_slam/slam_system.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>

#include "radar_slam/errors.hpp"
#include "radar_slam/pose_graph.hpp"

namespace radar_slam {

SlamSystem::SlamSystem(const PipelineConfig &config, RunMode mode)
    : config_(config), mode_(mode), odometry_(config) {
  if (mode_ == RunMode::kThreaded && config_.loop_closure) worker_ = std::thread([this] { worker_loop(); });
}

SlamSystem::~SlamSystem() {
  {
    std::lock_guard<std::mutex> lock(queue_mutex_);
    stopping_ = true;
  }
  queue_cv_.notify_all();
  if (worker_.joinable()) worker_.join();
}

const FrameResult &SlamSystem::process(const PolarScan &scan) {
  const auto t0 = std::chrono::steady_clock::now();
  FrameResult frame = odometry_.process(scan);
  const bool make_keyframe =
      last_keyframe_ < 0 || should_create_keyframe(frame.pose, frame.tracked, last_keyframe_tracking_, config_.keyframe);
  if (make_keyframe) create_keyframe(scan, frame);
  for (const auto &a : frame.new_anchors) map_.add_map_point(a.world, last_keyframe_);
  reference_keyframe_.push_back(last_keyframe_);
  frames_.push_back(std::move(frame));
  if (make_keyframe && config_.loop_closure) {
    if (mode_ == RunMode::kTest) {
      handle_keyframe(last_keyframe_);
    } else {
      {
        std::lock_guard<std::mutex> lock(queue_mutex_);
        queue_.push_back(last_keyframe_);
      }
      queue_cv_.notify_all();
    }
  }
  const auto t1 = std::chrono::steady_clock::now();
  timings_.push_back({frames_.back().index, std::chrono::duration<double, std::milli>(t1 - t0).count()});
  return frames_.back();
}

void SlamSystem::create_keyframe(const PolarScan &scan, const FrameResult &frame) {
  Keyframe kf;
  kf.id = next_keyframe_id_++;
  kf.frame_index = frame.index;
  kf.tracking_pose = frame.pose;
  kf.twist = frame.twist;
  kf.stamp = frame.stamp;
  kf.scan = std::make_shared<const PolarScan>(scan);
  kf.cloud = extract_point_cloud(scan, config_.loop, config_.beam_time_compensation ? &frame.twist : nullptr);
  kf.descriptor = compute_descriptor(kf.cloud, config_.loop);
  const PcaSummary pca = pca_gate(kf.cloud, config_.loop.pca_ratio_max);
  kf.pca_ratio = pca.ratio;
  kf.pca_accepted = pca.accepted;

  Pose2 measurement;
  if (last_keyframe_ < 0) {
    kf.pose = frame.pose;
  } else {
    const auto prev = map_.keyframe_poses().at(last_keyframe_);
    measurement = prev.second.inverse() * frame.pose * Pose2(config_.odometry_yaw_bias, Eigen::Vector2d::Zero());
    kf.pose = prev.first * measurement;
  }
  const int id = kf.id;
  map_.add_keyframe(std::move(kf));
  if (last_keyframe_ >= 0) map_.add_odometry_edge(last_keyframe_, id, measurement, config_.odometry_information);
  last_keyframe_ = id;
  last_keyframe_tracking_ = frame.pose;
}

void SlamSystem::handle_keyframe(int id) {
  const auto query = map_.keyframe(id);
  if (!query) return;
  const std::vector<Keyframe> history = map_.keyframes_snapshot();
  const auto candidate = find_loop_candidate(*query, history, config_.loop);
  if (!candidate) return;
  const Keyframe &match = history.at(candidate->match);
  const LoopVerification ver = verify_and_estimate(*query, match, config_.geometry(), config_.loop);

  LoopRecord rec;
  rec.query = id;
  rec.match = match.id;
  rec.descriptor_distance = candidate->distance;
  rec.accepted = ver.accepted;
  rec.relative = ver.relative;
  rec.mean_residual = ver.mean_residual;
  rec.inlier_fraction = ver.inlier_fraction;
  if (ver.accepted) {
    map_.add_loop_edge(match.id, id, ver.relative, ver.information);
    const PoseGraph graph = map_.graph_snapshot();
    const PoseGraphResult res = optimize(graph, graph.nodes().begin()->first, config_.graph);
    rec.chi2_before = res.initial_chi2;
    rec.chi2_after = res.final_chi2;
    map_.apply_correction(res.poses);
  }
  std::lock_guard<std::mutex> lock(loop_mutex_);
  loops_.push_back(rec);
}

void SlamSystem::worker_loop() {
  for (;;) {
    int id = -1;
    {
      std::unique_lock<std::mutex> lock(queue_mutex_);
      queue_cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
      if (queue_.empty()) return;
      id = queue_.front();
      queue_.pop_front();
    }
    try {
      handle_keyframe(id);
    } catch (...) {
      std::lock_guard<std::mutex> lock(queue_mutex_);
      if (!worker_error_) worker_error_ = std::current_exception();
    }
  }
}

void SlamSystem::finish() {
  {
    std::lock_guard<std::mutex> lock(queue_mutex_);
    stopping_ = true;
  }
  queue_cv_.notify_all();
  if (worker_.joinable()) worker_.join();
  if (worker_error_) std::rethrow_exception(worker_error_);
}

Trajectory SlamSystem::trajectory() const {
  const auto poses = map_.keyframe_poses();
  Trajectory out;
  for (size_t k = 0; k < frames_.size(); ++k) {
    const auto &[graph, tracking] = poses.at(reference_keyframe_[k]);
    out.push_back({frames_[k].stamp, graph * tracking.inverse() * frames_[k].pose});
  }
  return out;
}

Trajectory SlamSystem::odometry_trajectory() const {
  Trajectory out;
  for (const auto &f : frames_) out.push_back({f.stamp, f.pose});
  return out;
}

Trajectory SlamSystem::keyframe_trajectory() const {
  Trajectory out;
  for (const auto &kf : map_.keyframes_snapshot()) out.push_back({kf.stamp, kf.pose});
  return out;
}

std::vector<LoopRecord> SlamSystem::loops() const {
  std::lock_guard<std::mutex> lock(loop_mutex_);
  return loops_;
}

int SlamSystem::completed_frames() const {
  int n = 0;
  for (const auto &f : frames_) n += f.ok ? 1 : 0;
  return n;
}

void SlamSystem::write_outputs(const std::filesystem::path &dir) const {
  std::filesystem::create_directories(dir);
  write_trajectory(dir / "trajectory.txt", trajectory());
  write_trajectory(dir / "odometry.txt", odometry_trajectory());
  write_trajectory(dir / "keyframes.txt", keyframe_trajectory());
  std::vector<Eigen::Vector2d> points;
  for (const auto &p : map_.map_points_snapshot()) points.push_back(p.world_position);
  write_points(dir / "map_points.txt", points);

  auto open = [&](const char *name) {
    std::ofstream out(dir / name);
    if (!out) throw IoError("cannot write " + (dir / name).string());
    out << std::setprecision(10);
    return out;
  };
  {
    auto out = open("loops.csv");
    out << "query,match,descriptor_distance,accepted,x,y,theta,mean_residual,inlier_fraction,chi2_before,"
           "chi2_after\n";
    for (const auto &l : loops())
      out << l.query << ',' << l.match << ',' << l.descriptor_distance << ',' << (l.accepted ? 1 : 0) << ','
          << l.relative.x() << ',' << l.relative.y() << ',' << l.relative.angle() << ',' << l.mean_residual << ','
          << l.inlier_fraction << ',' << l.chi2_before << ',' << l.chi2_after << '\n';
  }
  {
    auto out = open("frames.csv");
    out << "frame,stamp,vx,vy,vtheta,tracked,inliers,ok,iterations\n";
    for (const auto &f : frames_)
      out << f.index << ',' << f.stamp << ',' << f.twist.vx << ',' << f.twist.vy << ',' << f.twist.vtheta << ','
          << f.tracked << ',' << f.inliers << ',' << (f.ok ? 1 : 0) << ',' << f.solver_iterations << '\n';
  }
  {
    auto out = open("timing.csv");
    out << "frame,tracking_ms\n";
    for (const auto &t : timings_) out << t.index << ',' << t.tracking_ms << '\n';
  }
  {
    auto out = open("pose_graph.g2o");
    out << map_.graph_snapshot().to_g2o();
  }
}

}  // namespace radar_slam
