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
 * \file outlier_rejection.hpp
 * \brief Pairwise distance consistency between two frames of tracked points,
 * exact maximum clique, and the closed-form rigid fit of the inliers.
 */
#pragma once

#include <vector>

#include <Eigen/Core>

#include "radar_slam/se2.hpp"

namespace radar_slam {

/// Default pairwise consistency threshold, pixels.
inline constexpr double kDefaultCliqueThreshold = 3.0;

class ConsistencyGraph {
 public:
  ConsistencyGraph() = default;
  explicit ConsistencyGraph(int n, double threshold = kDefaultCliqueThreshold);

  int size() const { return n_; }
  double threshold() const { return threshold_; }
  bool adjacent(int a, int b) const { return adjacency_[a * n_ + b] != 0; }
  /// Sets a symmetric edge; self loops are always present.
  void set_edge(int a, int b, bool value = true);
  int degree(int a) const;

 private:
  int n_ = 0;
  double threshold_ = kDefaultCliqueThreshold;
  std::vector<unsigned char> adjacency_;
};

/// Edge (m, n) iff | |P_prev^m - P_prev^n| - |P_curr^m - P_curr^n| | < threshold.
ConsistencyGraph build_consistency_graph(const std::vector<Eigen::Vector2d> &prev_points,
                                         const std::vector<Eigen::Vector2d> &curr_points,
                                         double threshold = kDefaultCliqueThreshold);

/// A maximum clique as a sorted index list. Among maximum cliques the
/// lexicographically smallest is returned.
std::vector<int> maximum_clique(const ConsistencyGraph &graph);

/// Least-squares T minimising sum |T * src_i - dst_i|^2.
Pose2 rigid_fit_svd(const std::vector<Eigen::Vector2d> &src, const std::vector<Eigen::Vector2d> &dst);

/// Same, with per-pair non-negative weights.
Pose2 rigid_fit_svd(const std::vector<Eigen::Vector2d> &src, const std::vector<Eigen::Vector2d> &dst,
                    const std::vector<double> &weights);

/// log(T_rel) / dt.
Twist2 initial_velocity(const Pose2 &relative, double dt);

}  // namespace radar_slam
