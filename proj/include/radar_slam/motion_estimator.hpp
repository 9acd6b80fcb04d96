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
 * \file motion_estimator.hpp
 * \brief Joint pose + twist estimation for one radar scan with per-beam
 * motion compensation.
 *
 * A landmark p_w observed at beam time t as the raw (distorted) local point
 * q gives the residual
 *
 *   r = T_wj^-1 * p_w - exp_twist(v_j, t) * q
 *
 * and the velocity prior couples the twist to the pose change since the
 * previous scan:
 *
 *   e_v = v_j - log(T_w,j-1^-1 * T_wj) / dt.
 *
 * The state is optimised with Levenberg-Marquardt. The increment is ordered
 * [d_twist (3), d_pose (3)]; the twist is updated additively and the pose by
 * left perturbation, exp(d_pose) * T.
 */
#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "radar_slam/se2.hpp"

namespace radar_slam {

struct FeatureObservation {
  Eigen::Vector2d world_point = Eigen::Vector2d::Zero();
  Eigen::Vector2d observed_local = Eigen::Vector2d::Zero();
  double beam_time = 0.0;
  Eigen::Matrix2d information = Eigen::Matrix2d::Identity();
};

struct EstimatorState {
  Pose2 pose;
  Twist2 twist;
};

struct EstimatorConfig {
  Eigen::Matrix3d velocity_information = Eigen::Vector3d(100.0, 100.0, 10000.0).asDiagonal();
  /// Cauchy scale in meters; <= 0 disables the robust kernel.
  double cauchy_scale = 0.5;
  int max_iterations = 50;
  /// Relative cost decrease below which the solver stops.
  double convergence_tol = 1e-10;
  double lm_initial_damping = 1e-4;
};

using Matrix26 = Eigen::Matrix<double, 2, 6>;
using Matrix36 = Eigen::Matrix<double, 3, 6>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Vector6 = Eigen::Matrix<double, 6, 1>;

struct FeatureResidual {
  Eigen::Vector2d residual;   // raw, meters
  double weight = 1.0;        // Cauchy IRLS weight
  Eigen::Matrix2d information;  // weight * obs.information
};

/// Raw residual plus its Cauchy weight for the given scale (<= 0: weight 1).
FeatureResidual feature_residual(const FeatureObservation &obs, const EstimatorState &state,
                                 double cauchy_scale = 0.5);

/// d r / d [twist, pose perturbation].
Matrix26 feature_jacobian(const FeatureObservation &obs, const EstimatorState &state);

Eigen::Vector3d velocity_residual(const EstimatorState &state, const Pose2 &prev_pose, double dt);

/// d e_v / d [twist, pose perturbation].
Matrix36 velocity_jacobian(const EstimatorState &state, const Pose2 &prev_pose, double dt);

/// Applies an increment ordered [d_twist, d_pose].
EstimatorState apply_increment(const EstimatorState &state, const Vector6 &delta);

/// Robust total cost of the problem.
double total_cost(const std::vector<FeatureObservation> &observations, const EstimatorState &state,
                  const Pose2 &prev_pose, double dt, const EstimatorConfig &config);

struct IterationRecord {
  int iteration = 0;
  double cost = 0.0;
  double damping = 0.0;
  bool accepted = false;
};

struct SolveReport {
  EstimatorState state;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Fewer than 3 observations: the solution is driven by the prior.
  bool degenerate = false;
  std::vector<IterationRecord> records;
  /// Gauss-Newton Hessian at the solution, ordered [twist, pose].
  Matrix6 hessian = Matrix6::Zero();

  /// Pose block with the twist marginalised out.
  Eigen::Matrix3d pose_information() const;
  /// One "iter=<i> cost=<c> damping=<l> accepted=<0|1>" line per record.
  std::string log_lines() const;
};

/// Throws NumericalError on a non-finite cost, InputError if dt <= 0.
SolveReport solve(const std::vector<FeatureObservation> &observations, const EstimatorState &init,
                  const Pose2 &prev_pose, double dt, const EstimatorConfig &config = {});

/// World position of a raw observation: T * exp_twist(v, t) * q.
Eigen::Vector2d place_new_point(const Eigen::Vector2d &observed_local, double beam_time,
                                const EstimatorState &state);

}  // namespace radar_slam
