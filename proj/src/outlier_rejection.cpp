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

#include "radar_slam/outlier_rejection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "radar_slam/errors.hpp"

namespace radar_slam {

ConsistencyGraph::ConsistencyGraph(int n, double threshold)
    : n_(n), threshold_(threshold), adjacency_(static_cast<size_t>(n) * n, 0) {
  for (int i = 0; i < n; ++i) adjacency_[i * n + i] = 1;
}

void ConsistencyGraph::set_edge(int a, int b, bool value) {
  if (a == b) return;
  adjacency_[a * n_ + b] = value;
  adjacency_[b * n_ + a] = value;
}

int ConsistencyGraph::degree(int a) const {
  int d = 0;
  for (int b = 0; b < n_; ++b) d += (b != a && adjacent(a, b)) ? 1 : 0;
  return d;
}

ConsistencyGraph build_consistency_graph(const std::vector<Eigen::Vector2d> &prev_points,
                                         const std::vector<Eigen::Vector2d> &curr_points,
                                         double threshold) {
  if (prev_points.size() != curr_points.size())
    throw InputError("consistency graph needs paired point lists of equal length");
  const int n = static_cast<int>(prev_points.size());
  ConsistencyGraph g(n, threshold);
  for (int m = 0; m < n; ++m)
    for (int k = m + 1; k < n; ++k) {
      const double d_prev = (prev_points[m] - prev_points[k]).norm();
      const double d_curr = (curr_points[m] - curr_points[k]).norm();
      if (std::abs(d_prev - d_curr) < threshold) g.set_edge(m, k);
    }
  return g;
}

namespace {

// Branch and bound with greedy colouring bounds (Tomita & Seki style).
class CliqueSearch {
 public:
  CliqueSearch(const ConsistencyGraph &g, int stop_at) : g_(g), stop_at_(stop_at) {}

  int run(const std::vector<int> &candidates) {
    best_ = 0;
    if (!candidates.empty()) expand(candidates, 0);
    return best_;
  }

 private:
  void colour_sort(const std::vector<int> &r, std::vector<int> &order, std::vector<int> &colour) {
    std::vector<std::vector<int>> classes;
    for (int v : r) {
      size_t k = 0;
      for (; k < classes.size(); ++k) {
        bool conflict = false;
        for (int u : classes[k])
          if (g_.adjacent(u, v)) {
            conflict = true;
            break;
          }
        if (!conflict) break;
      }
      if (k == classes.size()) classes.emplace_back();
      classes[k].push_back(v);
    }
    order.clear();
    colour.clear();
    for (size_t k = 0; k < classes.size(); ++k)
      for (int v : classes[k]) {
        order.push_back(v);
        colour.push_back(static_cast<int>(k) + 1);
      }
  }

  void expand(std::vector<int> r, int size) {
    std::vector<int> order, colour;
    colour_sort(r, order, colour);
    for (int i = static_cast<int>(order.size()) - 1; i >= 0; --i) {
      if (size + colour[i] <= best_ || best_ >= stop_at_) return;
      const int v = order[i];
      std::vector<int> next;
      for (int j = 0; j < i; ++j)
        if (g_.adjacent(v, order[j])) next.push_back(order[j]);
      if (next.empty()) {
        best_ = std::max(best_, size + 1);
      } else {
        expand(next, size + 1);
      }
    }
  }

  const ConsistencyGraph &g_;
  int stop_at_;
  int best_ = 0;
};

}  // namespace

std::vector<int> maximum_clique(const ConsistencyGraph &graph) {
  const int n = graph.size();
  if (n == 0) return {};
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  const int omega = CliqueSearch(graph, n).run(all);

  std::vector<int> chosen;
  std::vector<int> candidates = all;
  while (static_cast<int>(chosen.size()) < omega) {
    const int need = omega - static_cast<int>(chosen.size()) - 1;
    bool extended = false;
    for (int v : candidates) {
      std::vector<int> rest;
      for (int u : candidates)
        if (u > v && graph.adjacent(u, v)) rest.push_back(u);
      if (static_cast<int>(rest.size()) < need) continue;
      if (need == 0 || CliqueSearch(graph, need).run(rest) >= need) {
        chosen.push_back(v);
        candidates = std::move(rest);
        extended = true;
        break;
      }
    }
    if (!extended) break;  // unreachable for a consistent omega
  }
  return chosen;
}

Pose2 rigid_fit_svd(const std::vector<Eigen::Vector2d> &src, const std::vector<Eigen::Vector2d> &dst,
                    const std::vector<double> &weights) {
  if (src.size() != dst.size() || weights.size() != src.size())
    throw InputError("rigid fit needs paired point lists");
  if (src.size() < 2) throw DegenerateError("rigid fit needs at least 2 pairs");
  double w_sum = 0.0;
  Eigen::Vector2d cs = Eigen::Vector2d::Zero(), cd = Eigen::Vector2d::Zero();
  for (size_t i = 0; i < src.size(); ++i) {
    w_sum += weights[i];
    cs += weights[i] * src[i];
    cd += weights[i] * dst[i];
  }
  if (!(w_sum > 0.0)) throw DegenerateError("rigid fit weights sum to zero");
  cs /= w_sum;
  cd /= w_sum;
  Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
  double spread_src = 0.0, spread_dst = 0.0;
  for (size_t i = 0; i < src.size(); ++i) {
    const Eigen::Vector2d a = src[i] - cs;
    const Eigen::Vector2d b = dst[i] - cd;
    h += weights[i] * a * b.transpose();
    spread_src += weights[i] * a.squaredNorm();
    spread_dst += weights[i] * b.squaredNorm();
  }
  const double scale = std::max(1.0, cs.squaredNorm() + cd.squaredNorm());
  if (spread_src <= 1e-24 * scale * w_sum || spread_dst <= 1e-24 * scale * w_sum)
    throw DegenerateError("rigid fit points are coincident");

  Eigen::JacobiSVD<Eigen::Matrix2d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix2d d = Eigen::Matrix2d::Identity();
  d(1, 1) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  const Eigen::Matrix2d r = svd.matrixV() * d * svd.matrixU().transpose();
  const Eigen::Vector2d t = cd - r * cs;
  return Pose2(std::atan2(r(1, 0), r(0, 0)), t);
}

Pose2 rigid_fit_svd(const std::vector<Eigen::Vector2d> &src, const std::vector<Eigen::Vector2d> &dst) {
  return rigid_fit_svd(src, dst, std::vector<double>(src.size(), 1.0));
}

Twist2 initial_velocity(const Pose2 &relative, double dt) {
  if (!(dt > 0.0)) throw InputError("initial velocity needs a positive time step");
  return Twist2(log_pose(relative) / dt);
}

}  // namespace radar_slam
