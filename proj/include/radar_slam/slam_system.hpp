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
 * \file slam_system.hpp
 * \brief Odometry, keyframing, loop closure and pose-graph correction.
 *
 * In test mode loop closure runs synchronously whenever a keyframe is
 * created, so results are deterministic. In threaded mode keyframes are
 * queued to a worker thread that searches, verifies and optimises while the
 * tracker keeps running.
 *
 * Frame poses are reported relative to their reference keyframe:
 * pose_j = graph_pose(ref) * tracking_pose(ref)^-1 * tracking_pose_j.
 */
#pragma once

#include <condition_variable>
#include <deque>
#include <exception>
#include <filesystem>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "radar_slam/config.hpp"
#include "radar_slam/io.hpp"
#include "radar_slam/keyframe_map.hpp"
#include "radar_slam/loop_closure.hpp"
#include "radar_slam/odometry.hpp"

namespace radar_slam {

enum class RunMode { kTest, kThreaded };

struct LoopRecord {
  int query = -1;
  int match = -1;
  double descriptor_distance = 0.0;
  bool accepted = false;
  Pose2 relative;
  double mean_residual = 0.0;
  double inlier_fraction = 0.0;
  double chi2_before = 0.0;
  double chi2_after = 0.0;
};

struct FrameTiming {
  int index = 0;
  double tracking_ms = 0.0;
};

class SlamSystem {
 public:
  SlamSystem(const PipelineConfig &config, RunMode mode);
  ~SlamSystem();
  SlamSystem(const SlamSystem &) = delete;
  SlamSystem &operator=(const SlamSystem &) = delete;

  /// Tracks one scan; may create a keyframe.
  const FrameResult &process(const PolarScan &scan);
  /// Waits for pending loop-closure work and stops the worker.
  void finish();

  /// Per-frame poses after all pose-graph corrections.
  Trajectory trajectory() const;
  /// Raw tracker poses.
  Trajectory odometry_trajectory() const;
  /// Keyframe graph poses.
  Trajectory keyframe_trajectory() const;
  std::vector<LoopRecord> loops() const;
  const std::vector<FrameTiming> &timings() const { return timings_; }
  const std::vector<FrameResult> &frames() const { return frames_; }
  const SlamMap &map() const { return map_; }
  int completed_frames() const;

  /// trajectory.txt, odometry.txt, keyframes.txt, map_points.txt,
  /// frames.csv, loops.csv, timing.csv and pose_graph.g2o.
  void write_outputs(const std::filesystem::path &dir) const;

 private:
  void create_keyframe(const PolarScan &scan, const FrameResult &frame);
  void handle_keyframe(int id);
  void worker_loop();

  PipelineConfig config_;
  RunMode mode_;
  RadarOdometry odometry_;
  SlamMap map_;
  std::vector<FrameResult> frames_;
  std::vector<int> reference_keyframe_;
  std::vector<FrameTiming> timings_;
  int last_keyframe_ = -1;
  Pose2 last_keyframe_tracking_;
  int next_keyframe_id_ = 0;

  mutable std::mutex loop_mutex_;
  std::vector<LoopRecord> loops_;

  std::mutex queue_mutex_;
  std::condition_variable queue_cv_;
  std::deque<int> queue_;
  bool stopping_ = false;
  bool busy_ = false;
  std::thread worker_;
  std::exception_ptr worker_error_;
};

}  // namespace radar_slam
