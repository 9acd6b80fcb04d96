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

#include "radar_slam/pose_graph.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "radar_slam/errors.hpp"

namespace radar_slam {

Eigen::Vector3d edge_error(const Pose2 &ti, const Pose2 &tj, const Pose2 &measurement) {
  return log_pose(measurement.inverse() * ti.inverse() * tj);
}

void edge_jacobians(const Pose2 &ti, const Pose2 &tj, const Pose2 &measurement, Eigen::Matrix3d &jac_i,
                    Eigen::Matrix3d &jac_j) {
  const Eigen::Matrix2d a = measurement.rotation().transpose() * ti.rotation().transpose();
  const Eigen::Vector2d at = a * (skew_unit() * tj.translation());
  jac_j.setZero();
  jac_j.block<2, 2>(0, 0) = a;
  jac_j.block<2, 1>(0, 2) = at;
  jac_j(2, 2) = 1.0;
  jac_i = -jac_j;
}

double graph_chi2(const PoseGraph &graph, const std::map<int, Pose2> &poses) {
  double chi2 = 0.0;
  for (const auto &e : graph.edges()) {
    const Eigen::Vector3d r = edge_error(poses.at(e.from), poses.at(e.to), e.measurement);
    chi2 += r.dot(e.information * r);
  }
  return chi2;
}

double jacobian_check(const PoseGraph &graph, double step) {
  double worst = 0.0;
  for (const auto &e : graph.edges()) {
    const Pose2 &ti = graph.pose(e.from);
    const Pose2 &tj = graph.pose(e.to);
    Eigen::Matrix3d ji, jj;
    edge_jacobians(ti, tj, e.measurement, ji, jj);
    for (int k = 0; k < 3; ++k) {
      Eigen::Vector3d d = Eigen::Vector3d::Zero();
      d(k) = step;
      auto diff = [](const Eigen::Vector3d &a, const Eigen::Vector3d &b) {
        Eigen::Vector3d out = a - b;
        out(2) = normalize_angle(out(2));
        return out;
      };
      const Eigen::Vector3d ni =
          diff(edge_error(perturb(d, ti), tj, e.measurement), edge_error(perturb(-d, ti), tj, e.measurement)) /
          (2.0 * step);
      const Eigen::Vector3d nj =
          diff(edge_error(ti, perturb(d, tj), e.measurement), edge_error(ti, perturb(-d, tj), e.measurement)) /
          (2.0 * step);
      for (int r = 0; r < 3; ++r) {
        worst = std::max(worst, std::abs(ji(r, k) - ni(r)) / std::max(1.0, std::abs(ni(r))));
        worst = std::max(worst, std::abs(jj(r, k) - nj(r)) / std::max(1.0, std::abs(nj(r))));
      }
    }
  }
  return worst;
}

namespace {

struct Linearisation {
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd b;
};

// Normal equations over free nodes; index[id] = -1 marks the anchor.
Linearisation linearise(const PoseGraph &graph, const std::map<int, Pose2> &poses,
                        const std::map<int, int> &index, int n_free) {
  Linearisation lin;
  lin.b = Eigen::VectorXd::Zero(3 * n_free);
  for (const auto &e : graph.edges()) {
    const Pose2 &ti = poses.at(e.from);
    const Pose2 &tj = poses.at(e.to);
    const Eigen::Vector3d r = edge_error(ti, tj, e.measurement);
    Eigen::Matrix3d ji, jj;
    edge_jacobians(ti, tj, e.measurement, ji, jj);
    const int a = index.at(e.from);
    const int c = index.at(e.to);
    const Eigen::Matrix3d &w = e.information;
    auto add_block = [&](int row, int col, const Eigen::Matrix3d &m) {
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q)
          if (m(p, q) != 0.0) lin.triplets.emplace_back(3 * row + p, 3 * col + q, m(p, q));
    };
    if (a >= 0) {
      add_block(a, a, ji.transpose() * w * ji);
      lin.b.segment<3>(3 * a) += ji.transpose() * w * r;
    }
    if (c >= 0) {
      add_block(c, c, jj.transpose() * w * jj);
      lin.b.segment<3>(3 * c) += jj.transpose() * w * r;
    }
    if (a >= 0 && c >= 0) {
      const Eigen::Matrix3d off = ji.transpose() * w * jj;
      add_block(a, c, off);
      add_block(c, a, off.transpose());
    }
  }
  return lin;
}

}  // namespace

PoseGraphResult optimize(const PoseGraph &graph, int anchor, const PoseGraphOptions &options) {
  if (!graph.has_node(anchor)) throw GraphError("anchor node " + std::to_string(anchor) + " is not in the graph");
  if (!graph.connected()) throw GraphError("pose graph is disconnected");

  PoseGraphResult result;
  result.poses = graph.nodes();
  std::map<int, int> index;
  std::vector<int> ids;
  for (const auto &[id, pose] : graph.nodes()) {
    (void)pose;
    if (id == anchor) {
      index[id] = -1;
    } else {
      index[id] = static_cast<int>(ids.size());
      ids.push_back(id);
    }
  }
  const int n_free = static_cast<int>(ids.size());
  double chi2 = graph_chi2(graph, result.poses);
  if (!std::isfinite(chi2)) throw NumericalError("non-finite pose graph chi2");
  result.initial_chi2 = chi2;
  result.final_chi2 = chi2;
  if (n_free == 0 || graph.edges().empty() || chi2 <= 1e-20 * graph.edges().size()) {
    result.converged = true;
    return result;
  }

  const int dim = 3 * n_free;
  const bool dense = n_free <= options.dense_limit;
  double lambda = options.initial_damping;
  for (int it = 1; it <= options.max_iterations; ++it) {
    result.iterations = it;
    const Linearisation lin = linearise(graph, result.poses, index, n_free);
    Eigen::SparseMatrix<double> h(dim, dim);
    h.setFromTriplets(lin.triplets.begin(), lin.triplets.end());
    const Eigen::VectorXd diag = h.diagonal();
    const double floor = std::max(1e-12, 1e-9 * diag.maxCoeff());

    bool accepted = false;
    double new_chi2 = chi2;
    std::map<int, Pose2> candidate;
    while (lambda < 1e12) {
      Eigen::SparseMatrix<double> a = h;
      for (int k = 0; k < dim; ++k) a.coeffRef(k, k) += lambda * std::max(diag(k), floor);
      Eigen::VectorXd delta;
      if (dense) {
        delta = Eigen::MatrixXd(a).ldlt().solve(-lin.b);
      } else {
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(a);
        if (solver.info() != Eigen::Success) throw NumericalError("sparse factorisation failed");
        delta = solver.solve(-lin.b);
      }
      if (!delta.allFinite()) throw NumericalError("non-finite pose graph increment");
      candidate = result.poses;
      for (int k = 0; k < n_free; ++k) candidate[ids[k]] = perturb(delta.segment<3>(3 * k), candidate[ids[k]]);
      new_chi2 = graph_chi2(graph, candidate);
      if (std::isfinite(new_chi2) && new_chi2 < chi2) {
        accepted = true;
        lambda = std::max(lambda * 0.3, 1e-12);
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      result.converged = true;
      break;
    }
    const double decrease = chi2 - new_chi2;
    result.poses = std::move(candidate);
    chi2 = new_chi2;
    if (decrease <= options.relative_tolerance * (chi2 + decrease)) {
      result.converged = true;
      break;
    }
  }
  result.final_chi2 = chi2;
  return result;
}

}  // namespace radar_slam
