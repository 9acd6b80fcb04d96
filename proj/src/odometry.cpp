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

#include "radar_slam/odometry.hpp"

#include <algorithm>

#include "radar_slam/errors.hpp"
#include "radar_slam/outlier_rejection.hpp"

namespace radar_slam {

RadarOdometry::RadarOdometry(const PipelineConfig &config) : config_(config), geom_(config.geometry()) {
  config_.validate();
}

Eigen::Vector2d RadarOdometry::observed_local(const TrackedFeature &f) const {
  return pixel_to_metric(f.pixel, geom_);
}

double RadarOdometry::effective_time(const TrackedFeature &f) const {
  return config_.beam_time_compensation ? f.beam_time : 0.0;
}

std::vector<FeatureObservation> RadarOdometry::observations(const std::vector<int> &ids) const {
  const double info = 1.0 / (config_.cartesian_resolution * config_.cartesian_resolution);
  std::vector<FeatureObservation> obs;
  obs.reserve(ids.size());
  for (int i : ids) {
    const auto &f = features_[i];
    obs.push_back({anchors_.at(f.id).world, observed_local(f), effective_time(f),
                   info * Eigen::Matrix2d::Identity()});
  }
  return obs;
}

void RadarOdometry::spawn(const CartesianImage &img, const PolarScan &scan, FrameResult &result) {
  const auto keypoints = spawn_new_points(img, features_, config_.feature_target, config_.grid, config_.detector);
  const EstimatorState state{pose_, twist_};
  for (const auto &kp : keypoints) {
    bool crowded = false;
    for (const auto &f : features_)
      if (f.alive() && (f.pixel - kp.pixel).norm() < config_.clique_threshold) {
        crowded = true;
        break;
      }
    if (crowded) continue;
    TrackedFeature f;
    f.pixel = kp.pixel;
    try {
      f.beam_time = pixel_beam_time(kp.pixel, geom_, scan);
    } catch (const DegenerateError &) {
      continue;
    }
    f.id = next_id_++;
    const Eigen::Vector2d q = observed_local(f);
    const double t = effective_time(f);
    const Eigen::Vector2d w = place_new_point(q, t, state);
    anchors_[f.id] = {w, q, t, frame_};
    features_.push_back(f);
    result.new_anchors.push_back({f.id, w});
  }
}

FrameResult RadarOdometry::process(const PolarScan &scan) {
  scan.validate();
  if (frame_ > 0 && !(scan.stamp > prev_stamp_))
    throw InputError("scan stamps must strictly increase (frame " + std::to_string(frame_) + ")");
  const CartesianImage img = polar_to_cartesian(scan, geom_, config_.max_range);
  FrameResult result;
  result.index = frame_;
  result.stamp = scan.stamp;

  if (frame_ == 0) {
    pose_ = Pose2();
    twist_ = Twist2();
    spawn(img, scan, result);
  } else {
    const double dt = scan.stamp - prev_stamp_;
    const Pose2 predicted = pose_ * exp_twist(twist_, dt);
    std::vector<Eigen::Vector2d> guesses;
    guesses.reserve(features_.size());
    for (const auto &f : features_) {
      if (!f.alive()) {
        guesses.push_back(f.pixel);
        continue;
      }
      const Pose2 at_beam = predicted * exp_twist(twist_, effective_time(f));
      const Eigen::Vector2d g = metric_to_pixel(at_beam.inverse().act(anchors_.at(f.id).world), geom_);
      guesses.push_back(img.contains(g) ? g : f.pixel);
    }
    const std::vector<TrackedFeature> previous = features_;
    features_ = klt_track(prev_image_, img, features_, config_.klt, &scan, guesses);

    std::vector<int> tracked;
    for (int i = 0; i < static_cast<int>(features_.size()); ++i)
      if (features_[i].alive()) tracked.push_back(i);
    result.tracked = static_cast<int>(tracked.size());

    std::vector<Eigen::Vector2d> prev_px, curr_px;
    for (int i : tracked) {
      prev_px.push_back(previous[i].pixel);
      curr_px.push_back(features_[i].pixel);
    }
    const std::vector<int> clique =
        maximum_clique(build_consistency_graph(prev_px, curr_px, config_.clique_threshold));
    std::vector<int> inliers;
    std::vector<char> in_clique(tracked.size(), 0);
    for (int k : clique) in_clique[k] = 1;
    for (size_t k = 0; k < tracked.size(); ++k) {
      if (in_clique[k]) {
        inliers.push_back(tracked[k]);
      } else {
        features_[tracked[k]].status = FeatureStatus::kLost;
      }
    }
    result.inliers = static_cast<int>(inliers.size());

    EstimatorState init{predicted, twist_};
    if (inliers.size() >= 3) {
      std::vector<Eigen::Vector2d> src, dst;
      for (int i : inliers) {
        src.push_back(observed_local(features_[i]));
        dst.push_back(pixel_to_metric(previous[i].pixel, geom_));
      }
      try {
        const Pose2 rel = rigid_fit_svd(src, dst);
        init = {pose_ * rel, initial_velocity(rel, dt)};
      } catch (const DegenerateError &) {
      }
    }

    // Frame-0 anchors were placed before any velocity was known; re-place
    // them assuming the first inter-frame velocity held during scan 0.
    auto replace_first_anchors = [&](const Twist2 &v) {
      for (auto &[id, a] : anchors_)
        if (a.first_frame == 0) a.world = exp_twist(v, a.first_time).act(a.first_local);
    };
    const bool bootstrap = frame_ == 1 && config_.beam_time_compensation;
    if (bootstrap) replace_first_anchors(init.twist);
    SolveReport report = solve(observations(inliers), init, pose_, dt, config_.estimator);
    if (bootstrap) {
      replace_first_anchors(report.state.twist);
      report = solve(observations(inliers), report.state, pose_, dt, config_.estimator);
    }
    result.ok = !report.degenerate;
    result.solver_iterations = report.iterations;
    result.final_cost = report.final_cost;
    result.pose_information = report.pose_information();

    for (int i : inliers) {
      const FeatureObservation obs = observations({i}).front();
      if (feature_residual(obs, report.state, 0.0).residual.norm() > config_.max_feature_residual)
        features_[i].status = FeatureStatus::kLost;
    }
    pose_ = report.state.pose;
    twist_ = report.state.twist;

    std::vector<TrackedFeature> kept;
    for (const auto &f : features_) {
      if (f.alive()) {
        kept.push_back(f);
      } else {
        anchors_.erase(f.id);
      }
    }
    features_ = std::move(kept);
    if (static_cast<int>(features_.size()) < config_.respawn_below) spawn(img, scan, result);
  }

  prev_image_ = img;
  prev_stamp_ = scan.stamp;
  ++frame_;
  result.pose = pose_;
  result.twist = twist_;
  if (frame_ == 1) result.tracked = static_cast<int>(features_.size());
  return result;
}

}  // namespace radar_slam
