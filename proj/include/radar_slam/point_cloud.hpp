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

#pragma once

#include <vector>

#include <Eigen/Core>

namespace radar_slam {

struct PointCloud2D {
  std::vector<Eigen::Vector2d> points;

  size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Rotation-invariant place signature; unit L2 norm when not degenerate.
struct PlaceDescriptor {
  Eigen::VectorXd vector;
  bool degenerate = true;
};

}  // namespace radar_slam
