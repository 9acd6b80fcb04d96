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

#include "radar_slam/motion_estimator.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "radar_slam/errors.hpp"

namespace radar_slam {

namespace {

// Cauchy scale in whitened units: for isotropic information lambda * I the
// ratio x / c^2 equals |r|^2 / s^2.
double whitened_scale2(const Eigen::Matrix2d &info, double cauchy_scale) {
  return cauchy_scale * cauchy_scale * 0.5 * info.trace();
}

double robust_cost(double x, double c2) {
  if (c2 <= 0.0) return x;
  return c2 * std::log1p(x / c2);
}

double robust_weight(double x, double c2) {
  if (c2 <= 0.0) return 1.0;
  return 1.0 / (1.0 + x / c2);
}

}  // namespace

FeatureResidual feature_residual(const FeatureObservation &obs, const EstimatorState &state,
                                 double cauchy_scale) {
  FeatureResidual out;
  const Eigen::Vector2d predicted = state.pose.inverse().act(obs.world_point);
  const Eigen::Vector2d compensated = exp_twist(state.twist, obs.beam_time).act(obs.observed_local);
  out.residual = predicted - compensated;
  if (cauchy_scale > 0.0) {
    out.weight = 1.0 / (1.0 + out.residual.squaredNorm() / (cauchy_scale * cauchy_scale));
  }
  out.information = out.weight * obs.information;
  return out;
}

Matrix26 feature_jacobian(const FeatureObservation &obs, const EstimatorState &state) {
  const double t = obs.beam_time;
  const Eigen::Matrix2d rt = state.pose.rotation().transpose();
  const Eigen::Matrix2d j = skew_unit();
  const Eigen::Vector2d rotated = rotation_matrix(state.twist.vtheta * t) * obs.observed_local;

  Matrix26 jac;
  jac.block<2, 2>(0, 0) = -t * Eigen::Matrix2d::Identity();
  jac.block<2, 1>(0, 2) = -t * (j * rotated);
  jac.block<2, 2>(0, 3) = -rt;
  jac.block<2, 1>(0, 5) = -rt * (j * obs.world_point);
  return jac;
}

Eigen::Vector3d velocity_residual(const EstimatorState &state, const Pose2 &prev_pose, double dt) {
  if (!(dt > 0.0)) throw InputError("velocity residual needs a positive time step");
  return state.twist.vector() - log_pose(prev_pose.inverse() * state.pose) / dt;
}

Matrix36 velocity_jacobian(const EstimatorState &state, const Pose2 &prev_pose, double dt) {
  const Eigen::Matrix2d rpt = prev_pose.rotation().transpose();
  Matrix36 jac = Matrix36::Zero();
  jac.block<3, 3>(0, 0).setIdentity();
  jac.block<2, 2>(0, 3) = -rpt / dt;
  jac.block<2, 1>(0, 5) = -rpt * (skew_unit() * state.pose.translation()) / dt;
  jac(2, 5) = -1.0 / dt;
  return jac;
}

EstimatorState apply_increment(const EstimatorState &state, const Vector6 &delta) {
  EstimatorState out;
  out.twist = Twist2(state.twist.vector() + delta.head<3>());
  out.pose = perturb(delta.tail<3>(), state.pose);
  return out;
}

double total_cost(const std::vector<FeatureObservation> &observations, const EstimatorState &state,
                  const Pose2 &prev_pose, double dt, const EstimatorConfig &config) {
  double cost = 0.0;
  for (const auto &obs : observations) {
    const auto r = feature_residual(obs, state, 0.0).residual;
    const double x = r.dot(obs.information * r);
    const double c2 = config.cauchy_scale > 0.0 ? whitened_scale2(obs.information, config.cauchy_scale) : 0.0;
    cost += robust_cost(x, c2);
  }
  const Eigen::Vector3d ev = velocity_residual(state, prev_pose, dt);
  cost += ev.dot(config.velocity_information * ev);
  return cost;
}

Eigen::Matrix3d SolveReport::pose_information() const {
  const Eigen::Matrix3d hvv = hessian.topLeftCorner<3, 3>();
  const Eigen::Matrix3d hvp = hessian.topRightCorner<3, 3>();
  const Eigen::Matrix3d hpp = hessian.bottomRightCorner<3, 3>();
  const Eigen::Matrix3d hvv_inv =
      hvv.completeOrthogonalDecomposition().pseudoInverse();
  Eigen::Matrix3d info = hpp - hvp.transpose() * hvv_inv * hvp;
  return 0.5 * (info + info.transpose());
}

std::string SolveReport::log_lines() const {
  std::ostringstream ss;
  for (const auto &r : records)
    ss << "iter=" << r.iteration << " cost=" << r.cost << " damping=" << r.damping
       << " accepted=" << (r.accepted ? 1 : 0) << '\n';
  return ss.str();
}

namespace {

void build_normal_equations(const std::vector<FeatureObservation> &observations,
                            const EstimatorState &state, const Pose2 &prev_pose, double dt,
                            const EstimatorConfig &config, Matrix6 &h, Vector6 &b) {
  h.setZero();
  b.setZero();
  for (const auto &obs : observations) {
    const Eigen::Vector2d r = feature_residual(obs, state, 0.0).residual;
    const double c2 = config.cauchy_scale > 0.0 ? whitened_scale2(obs.information, config.cauchy_scale) : 0.0;
    const double w = robust_weight(r.dot(obs.information * r), c2);
    const Matrix26 jac = feature_jacobian(obs, state);
    const Eigen::Matrix2d info = w * obs.information;
    h.noalias() += jac.transpose() * info * jac;
    b.noalias() += jac.transpose() * info * r;
  }
  const Eigen::Vector3d ev = velocity_residual(state, prev_pose, dt);
  const Matrix36 jv = velocity_jacobian(state, prev_pose, dt);
  h.noalias() += jv.transpose() * config.velocity_information * jv;
  b.noalias() += jv.transpose() * config.velocity_information * ev;
}

}  // namespace

SolveReport solve(const std::vector<FeatureObservation> &observations, const EstimatorState &init,
                  const Pose2 &prev_pose, double dt, const EstimatorConfig &config) {
  if (!(dt > 0.0)) throw InputError("solve needs a positive time step");
  SolveReport report;
  report.degenerate = observations.size() < 3;
  EstimatorState state = init;
  double cost = total_cost(observations, state, prev_pose, dt, config);
  if (!std::isfinite(cost)) throw NumericalError("non-finite initial cost");
  report.initial_cost = cost;
  double lambda = config.lm_initial_damping;

  Matrix6 h;
  Vector6 b;
  for (int it = 1; it <= config.max_iterations; ++it) {
    report.iterations = it;
    build_normal_equations(observations, state, prev_pose, dt, config, h, b);
    const double diag_floor = std::max(1e-12, 1e-9 * h.diagonal().maxCoeff());

    bool accepted = false;
    double new_cost = cost;
    EstimatorState candidate;
    while (lambda < 1e12) {
      Matrix6 a = h;
      for (int i = 0; i < 6; ++i) a(i, i) += lambda * std::max(h(i, i), diag_floor);
      const Vector6 delta = a.ldlt().solve(-b);
      if (!delta.allFinite()) throw NumericalError("non-finite LM increment");
      candidate = apply_increment(state, delta);
      new_cost = total_cost(observations, candidate, prev_pose, dt, config);
      if (!std::isfinite(new_cost)) throw NumericalError("non-finite cost");
      if (new_cost < cost) {
        accepted = true;
        report.records.push_back({it, new_cost, lambda, true});
        lambda = std::max(lambda * 0.3, 1e-12);
        break;
      }
      report.records.push_back({it, cost, lambda, false});
      lambda *= 10.0;
      if (delta.norm() < 1e-14) break;
    }
    if (!accepted) {
      report.converged = true;
      break;
    }
    const double decrease = cost - new_cost;
    state = candidate;
    cost = new_cost;
    if (decrease <= config.convergence_tol * (cost + decrease)) {
      report.converged = true;
      break;
    }
  }
  build_normal_equations(observations, state, prev_pose, dt, config, h, b);
  report.hessian = h;
  report.state = state;
  report.final_cost = cost;
  return report;
}

Eigen::Vector2d place_new_point(const Eigen::Vector2d &observed_local, double beam_time,
                                const EstimatorState &state) {
  return state.pose.act(exp_twist(state.twist, beam_time).act(observed_local));
}

}  // namespace radar_slam
