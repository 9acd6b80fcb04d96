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
 * \file se2.hpp
 * \brief Planar rigid transforms, twists and the exp/log maps used by the
 * estimators.
 *
 * The exponential map follows the constant-velocity scan model: a twist
 * (vx, vy, vtheta) integrated over t seconds yields rotation vtheta * t and
 * translation (vx * t, vy * t) placed directly in the translation column.
 * This is not the textbook SE(2) exponential (which premultiplies the
 * translation by the V matrix); the two agree for vtheta = 0. log_pose is
 * defined as the exact inverse of this map so that exp/log round trips hold.
 */
#pragma once

#include <Eigen/Core>

namespace radar_slam {

/// Wraps an angle into (-pi, pi].
double normalize_angle(double angle);

/// 2x2 rotation matrix.
Eigen::Matrix2d rotation_matrix(double angle);

/// The so(2) generator [[0, -1], [1, 0]].
inline Eigen::Matrix2d skew_unit() {
  Eigen::Matrix2d j;
  j << 0.0, -1.0, 1.0, 0.0;
  return j;
}

class Pose2 {
 public:
  Pose2() = default;
  Pose2(double angle, const Eigen::Vector2d &translation);
  Pose2(double x, double y, double angle);

  static Pose2 identity() { return Pose2(); }
  static Pose2 from_matrix(const Eigen::Matrix3d &m);

  double angle() const { return angle_; }
  const Eigen::Vector2d &translation() const { return translation_; }
  double x() const { return translation_.x(); }
  double y() const { return translation_.y(); }

  Eigen::Matrix2d rotation() const { return rotation_matrix(angle_); }
  Eigen::Matrix3d matrix() const;

  Pose2 inverse() const;
  Pose2 compose(const Pose2 &other) const;
  Pose2 operator*(const Pose2 &other) const { return compose(other); }

  /// R * p + t.
  Eigen::Vector2d act(const Eigen::Vector2d &p) const;
  /// Same as act() on a homogeneous point; the third coordinate is kept.
  Eigen::Vector3d act(const Eigen::Vector3d &p) const;

 private:
  double angle_ = 0.0;
  Eigen::Vector2d translation_ = Eigen::Vector2d::Zero();
};

/// Planar velocity [vx, vy, vtheta] in m/s and rad/s.
struct Twist2 {
  double vx = 0.0;
  double vy = 0.0;
  double vtheta = 0.0;

  Twist2() = default;
  Twist2(double x, double y, double theta) : vx(x), vy(y), vtheta(theta) {}
  explicit Twist2(const Eigen::Vector3d &v) : vx(v[0]), vy(v[1]), vtheta(v[2]) {}

  Eigen::Vector3d vector() const { return {vx, vy, vtheta}; }
  bool finite() const;
};

/// Constant-velocity motion over t seconds (closed form, see file comment).
Pose2 exp_twist(const Twist2 &v, double t);

/// Exponential of a 3-vector (rho_x, rho_y, phi), i.e. exp_twist(w, 1).
Pose2 exp_vector(const Eigen::Vector3d &w);

/// Inverse of exp_vector: (t_x, t_y, angle) with angle in (-pi, pi].
Eigen::Vector3d log_pose(const Pose2 &pose);

/// Left perturbation: exp(w) * pose.
Pose2 perturb(const Eigen::Vector3d &w, const Pose2 &pose);

}  // namespace radar_slam
