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

#include "radar_slam/se2.hpp"

#include <cmath>
#include <numbers>

namespace radar_slam {

double normalize_angle(double angle) {
  double a = std::remainder(angle, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

Eigen::Matrix2d rotation_matrix(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

Pose2::Pose2(double angle, const Eigen::Vector2d &translation)
    : angle_(normalize_angle(angle)), translation_(translation) {}

Pose2::Pose2(double x, double y, double angle)
    : angle_(normalize_angle(angle)), translation_(x, y) {}

Pose2 Pose2::from_matrix(const Eigen::Matrix3d &m) {
  return Pose2(std::atan2(m(1, 0), m(0, 0)), Eigen::Vector2d(m(0, 2), m(1, 2)));
}

Eigen::Matrix3d Pose2::matrix() const {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m.topLeftCorner<2, 2>() = rotation();
  m.topRightCorner<2, 1>() = translation_;
  return m;
}

Pose2 Pose2::inverse() const {
  const Eigen::Matrix2d rt = rotation().transpose();
  return Pose2(-angle_, -(rt * translation_));
}

Pose2 Pose2::compose(const Pose2 &other) const {
  return Pose2(angle_ + other.angle_, rotation() * other.translation_ + translation_);
}

Eigen::Vector2d Pose2::act(const Eigen::Vector2d &p) const {
  return rotation() * p + translation_;
}

Eigen::Vector3d Pose2::act(const Eigen::Vector3d &p) const {
  Eigen::Vector3d out;
  out.head<2>() = rotation() * p.head<2>() + p[2] * translation_;
  out[2] = p[2];
  return out;
}

bool Twist2::finite() const {
  return std::isfinite(vx) && std::isfinite(vy) && std::isfinite(vtheta);
}

Pose2 exp_twist(const Twist2 &v, double t) {
  return Pose2(v.vtheta * t, Eigen::Vector2d(v.vx * t, v.vy * t));
}

Pose2 exp_vector(const Eigen::Vector3d &w) {
  return Pose2(w[2], Eigen::Vector2d(w[0], w[1]));
}

Eigen::Vector3d log_pose(const Pose2 &pose) {
  return {pose.x(), pose.y(), pose.angle()};
}

Pose2 perturb(const Eigen::Vector3d &w, const Pose2 &pose) {
  if (w.isZero(0.0)) return pose;
  return exp_vector(w) * pose;
}

}  // namespace radar_slam
