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

#include "radar_slam/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "radar_slam/errors.hpp"
#include "radar_slam/outlier_rejection.hpp"

namespace radar_slam {

std::vector<AssociatedPair> associate(const Trajectory &estimate, const Trajectory &ground_truth) {
  if (ground_truth.size() < 2) throw InputError("ground truth needs at least two poses");
  std::vector<double> stamps;
  for (const auto &p : ground_truth) stamps.push_back(p.stamp);
  if (!std::is_sorted(stamps.begin(), stamps.end())) throw InputError("ground truth stamps must be sorted");
  std::vector<double> gaps;
  for (size_t k = 1; k < stamps.size(); ++k) gaps.push_back(stamps[k] - stamps[k - 1]);
  std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
  const double tolerance = 0.5 * gaps[gaps.size() / 2];

  std::vector<AssociatedPair> pairs;
  int unmatched = 0;
  for (const auto &e : estimate) {
    const auto it = std::lower_bound(stamps.begin(), stamps.end(), e.stamp);
    size_t best = stamps.size();
    double best_gap = tolerance;
    for (auto c : {it, it == stamps.begin() ? it : std::prev(it)}) {
      if (c == stamps.end()) continue;
      const double gap = std::abs(*c - e.stamp);
      if (gap <= best_gap) {
        best_gap = gap;
        best = static_cast<size_t>(c - stamps.begin());
      }
    }
    if (best == stamps.size()) {
      ++unmatched;
      continue;
    }
    pairs.push_back({e.pose, ground_truth[best].pose, e.stamp});
  }
  if (unmatched > 0)
    throw InputError(std::to_string(unmatched) + " of " + std::to_string(estimate.size()) +
                     " estimated poses have no ground truth within " + std::to_string(tolerance) + " s");
  return pairs;
}

RelativeError relative_error(const std::vector<AssociatedPair> &pairs, const std::vector<double> &lengths) {
  if (lengths.empty()) throw InputError("relative error needs at least one segment length");
  std::vector<double> dist(pairs.size(), 0.0);
  for (size_t k = 1; k < pairs.size(); ++k)
    dist[k] = dist[k - 1] + (pairs[k].reference.translation() - pairs[k - 1].reference.translation()).norm();
  const double shortest = *std::min_element(lengths.begin(), lengths.end());
  if (pairs.empty() || dist.back() < shortest)
    throw InputError("path length " + std::to_string(pairs.empty() ? 0.0 : dist.back()) +
                     " m is shorter than the smallest segment (" + std::to_string(shortest) + " m)");

  RelativeError out;
  double t_sum = 0.0, r_sum = 0.0;
  for (size_t first = 0; first < pairs.size(); ++first) {
    for (double len : lengths) {
      const auto it = std::lower_bound(dist.begin() + first, dist.end(), dist[first] + len);
      if (it == dist.end()) continue;
      const size_t last = static_cast<size_t>(it - dist.begin());
      const Pose2 d_ref = pairs[first].reference.inverse() * pairs[last].reference;
      const Pose2 d_est = pairs[first].estimate.inverse() * pairs[last].estimate;
      const Pose2 err = d_est.inverse() * d_ref;
      t_sum += err.translation().norm() / len;
      r_sum += std::abs(err.angle()) / len;
      ++out.segments;
    }
  }
  if (out.segments == 0) throw InputError("no complete segment in the trajectory");
  out.translation_percent = 100.0 * t_sum / out.segments;
  out.rotation_deg_per_100m = 100.0 * (180.0 / std::numbers::pi) * r_sum / out.segments;
  return out;
}

Pose2 align_trajectories(const std::vector<AssociatedPair> &pairs) {
  std::vector<Eigen::Vector2d> src, dst;
  for (const auto &p : pairs) {
    src.push_back(p.estimate.translation());
    dst.push_back(p.reference.translation());
  }
  if (src.size() < 2) throw InputError("alignment needs at least two poses");
  try {
    return rigid_fit_svd(src, dst);
  } catch (const DegenerateError &) {
    // Stationary trajectories: align the first pose only.
    return pairs.front().reference * pairs.front().estimate.inverse();
  }
}

double absolute_trajectory_error(const std::vector<AssociatedPair> &pairs) {
  const Pose2 align = align_trajectories(pairs);
  double sum = 0.0;
  for (const auto &p : pairs) sum += (align.act(p.estimate.translation()) - p.reference.translation()).squaredNorm();
  return std::sqrt(sum / pairs.size());
}

double completion_percentage(int completed_frames, int total_frames) {
  if (total_frames <= 0) throw InputError("total frame count must be positive");
  if (completed_frames < 0 || completed_frames > total_frames)
    throw InputError("completed frame count must lie in [0, total]");
  return 100.0 * completed_frames / total_frames;
}

std::string format_report(const RelativeError &rel, double ate, double completion) {
  std::ostringstream ss;
  ss << "translation_error_percent " << rel.translation_percent << '\n'
     << "rotation_error_deg_per_100m " << rel.rotation_deg_per_100m << '\n'
     << "segments " << rel.segments << '\n'
     << "ate_rmse_m " << ate << '\n'
     << "completion_percent " << completion << '\n';
  return ss.str();
}

}  // namespace radar_slam
