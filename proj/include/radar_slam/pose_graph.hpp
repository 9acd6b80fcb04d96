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
 * \file pose_graph.hpp
 * \brief Levenberg-Marquardt optimisation of an SE(2) pose graph.
 *
 * Edge error: e = log(Z^-1 * T_i^-1 * T_j). Poses are updated by left
 * perturbation, T <- exp(d) * T. One node (the anchor) is held fixed.
 */
#pragma once

#include <map>

#include <Eigen/Core>

#include "radar_slam/keyframe_map.hpp"
#include "radar_slam/se2.hpp"

namespace radar_slam {

struct PoseGraphOptions {
  int max_iterations = 100;
  /// Stop when the relative chi^2 decrease falls below this.
  double relative_tolerance = 1e-9;
  double initial_damping = 1e-4;
  /// Above this many free nodes a sparse factorisation is used.
  int dense_limit = 300;
};

struct PoseGraphResult {
  std::map<int, Pose2> poses;
  double initial_chi2 = 0.0;
  double final_chi2 = 0.0;
  int iterations = 0;
  bool converged = false;
};

Eigen::Vector3d edge_error(const Pose2 &ti, const Pose2 &tj, const Pose2 &measurement);

/// Analytic derivatives of edge_error w.r.t. left perturbations of T_i and T_j.
void edge_jacobians(const Pose2 &ti, const Pose2 &tj, const Pose2 &measurement, Eigen::Matrix3d &jac_i,
                    Eigen::Matrix3d &jac_j);

double graph_chi2(const PoseGraph &graph, const std::map<int, Pose2> &poses);

/// Largest entry-wise deviation between analytic and central-difference
/// Jacobians over all edges, relative to max(1, |numeric|).
double jacobian_check(const PoseGraph &graph, double step = 1e-6);

/// Throws GraphError if the anchor is missing or the graph is disconnected.
PoseGraphResult optimize(const PoseGraph &graph, int anchor, const PoseGraphOptions &options = {});

}  // namespace radar_slam
