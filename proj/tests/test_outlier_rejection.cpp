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


#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "radar_slam/errors.hpp"
#include "radar_slam/outlier_rejection.hpp"

namespace radar_slam {
namespace {

int brute_force_omega(const ConsistencyGraph &g) {
  const int n = g.size();
  int best = 0;
  for (uint32_t mask = 1; mask < (1u << n); ++mask) {
    const int size = __builtin_popcount(mask);
    if (size <= best) continue;
    bool clique = true;
    for (int a = 0; a < n && clique; ++a)
      if (mask & (1u << a))
        for (int b = a + 1; b < n; ++b)
          if ((mask & (1u << b)) && !g.adjacent(a, b)) {
            clique = false;
            break;
          }
    if (clique) best = size;
  }
  return best;
}

bool is_clique(const ConsistencyGraph &g, const std::vector<int> &c) {
  for (size_t i = 0; i < c.size(); ++i)
    for (size_t j = i + 1; j < c.size(); ++j)
      if (!g.adjacent(c[i], c[j])) return false;
  return true;
}

TEST(ConsistencyGraph, RigidTranslationIsComplete) {
  std::vector<Eigen::Vector2d> prev = {{0, 0}, {10, 3}, {-4, 8}, {7, -7}, {20, 1}};
  std::vector<Eigen::Vector2d> curr;
  for (const auto &p : prev) curr.push_back(p + Eigen::Vector2d(3.5, -2.0));
  const ConsistencyGraph g = build_consistency_graph(prev, curr);
  for (int a = 0; a < g.size(); ++a)
    for (int b = 0; b < g.size(); ++b) EXPECT_TRUE(g.adjacent(a, b));
}

TEST(ConsistencyGraph, DisplacedPointIsIsolated) {
  std::vector<Eigen::Vector2d> prev = {{0, 0}, {30, 3}, {-14, 28}, {27, -17}, {40, 11}, {5, 5}};
  const Eigen::Matrix3d t = oracle::pose_matrix(2.0, 1.0, 0.2);
  std::vector<Eigen::Vector2d> curr;
  for (const auto &p : prev) curr.push_back(oracle::apply(t, p));
  curr[5] += Eigen::Vector2d(10.0 * kDefaultCliqueThreshold, 0.0);
  const ConsistencyGraph g = build_consistency_graph(prev, curr);
  for (int b = 0; b < 5; ++b) EXPECT_FALSE(g.adjacent(5, b));
  EXPECT_TRUE(g.adjacent(5, 5));
  EXPECT_EQ(maximum_clique(g), (std::vector<int>{0, 1, 2, 3, 4}));
}

TEST(ConsistencyGraph, LengthMismatch) {
  EXPECT_THROW(build_consistency_graph({{0, 0}}, {}), InputError);
}

TEST(MaximumClique, CompleteGraph) {
  ConsistencyGraph g(9);
  for (int a = 0; a < 9; ++a)
    for (int b = a + 1; b < 9; ++b) g.set_edge(a, b);
  EXPECT_EQ(maximum_clique(g), (std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8}));
}

TEST(MaximumClique, EmptyGraph) { EXPECT_TRUE(maximum_clique(ConsistencyGraph(0)).empty()); }

TEST(MaximumClique, DisjointCliques) {
  std::mt19937_64 rng(8);
  const std::vector<int> big = {0, 2, 4, 6, 8, 10, 12};
  const std::vector<int> small = {1, 3, 5, 7};
  ConsistencyGraph g(13);
  for (size_t i = 0; i < big.size(); ++i)
    for (size_t j = i + 1; j < big.size(); ++j) g.set_edge(big[i], big[j]);
  for (size_t i = 0; i < small.size(); ++i)
    for (size_t j = i + 1; j < small.size(); ++j) g.set_edge(small[i], small[j]);
  // Each small vertex links to at most two big vertices, so no cross clique exceeds 3 + 2.
  for (int s : small) {
    std::uniform_int_distribution<size_t> pick(0, big.size() - 1);
    g.set_edge(s, big[pick(rng)]);
    g.set_edge(s, big[pick(rng)]);
  }
  ASSERT_EQ(brute_force_omega(g), 7);
  EXPECT_EQ(maximum_clique(g), big);
}

TEST(MaximumClique, AgreesWithBruteForce) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> size(1, 18);
  std::uniform_real_distribution<double> density(0.1, 0.9), coin(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = size(rng);
    const double p = density(rng);
    ConsistencyGraph g(n);
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (coin(rng) < p) g.set_edge(a, b);
    const auto c = maximum_clique(g);
    EXPECT_EQ(static_cast<int>(c.size()), brute_force_omega(g));
    EXPECT_TRUE(is_clique(g, c));
    EXPECT_TRUE(std::is_sorted(c.begin(), c.end()));
  }
}

TEST(RigidFit, IdentityWhenEqual) {
  const std::vector<Eigen::Vector2d> pts = {{0, 0}, {3, 1}, {-2, 5}};
  const Pose2 t = rigid_fit_svd(pts, pts);
  EXPECT_NEAR(t.angle(), 0.0, 1e-12);
  EXPECT_LT(t.translation().norm(), 1e-12);
}

TEST(RigidFit, RecoversTransform) {
  const Eigen::Matrix3d m = oracle::pose_matrix(1.5, -2.0, 0.3);
  const std::vector<Eigen::Vector2d> src = {{0, 0}, {3, 1}, {-2, 5}, {10, -4}, {7, 7}};
  std::vector<Eigen::Vector2d> dst;
  for (const auto &p : src) dst.push_back(oracle::apply(m, p));
  const Pose2 t = rigid_fit_svd(src, dst);
  EXPECT_NEAR(t.angle(), 0.3, 1e-9);
  EXPECT_NEAR(t.x(), 1.5, 1e-9);
  EXPECT_NEAR(t.y(), -2.0, 1e-9);
}

TEST(RigidFit, CollinearPointsAreExact) {
  const Eigen::Matrix3d m = oracle::pose_matrix(-4.0, 2.5, -1.2);
  const std::vector<Eigen::Vector2d> src = {{0, 0}, {1, 1}, {2, 2}, {5, 5}};
  std::vector<Eigen::Vector2d> dst;
  for (const auto &p : src) dst.push_back(oracle::apply(m, p));
  const Pose2 t = rigid_fit_svd(src, dst);
  EXPECT_NEAR(t.angle(), -1.2, 1e-9);
  EXPECT_NEAR(t.x(), -4.0, 1e-9);
  EXPECT_NEAR(t.y(), 2.5, 1e-9);
}

TEST(RigidFit, Degenerate) {
  EXPECT_THROW(rigid_fit_svd({{1, 1}}, {{2, 2}}), DegenerateError);
  EXPECT_THROW(rigid_fit_svd({{1, 1}, {1, 1}, {1, 1}}, {{2, 2}, {3, 3}, {4, 4}}), DegenerateError);
  EXPECT_THROW(rigid_fit_svd({{1, 1}, {2, 2}}, {{1, 1}}), InputError);
}

TEST(InitialVelocity, Identity) {
  EXPECT_EQ(initial_velocity(Pose2(), 0.25).vector().norm(), 0.0);
}

TEST(InitialVelocity, RoundTrip) {
  const Twist2 v(8.0, -0.5, 0.4);
  EXPECT_LT((initial_velocity(exp_twist(v, 0.25), 0.25).vector() - v.vector()).norm(), 1e-12);
}

TEST(InitialVelocity, ScalarLogOracle) {
  // exp_twist places translation directly, so log is (x, y, angle).
  const Twist2 v = initial_velocity(Pose2(0.1, Eigen::Vector2d(1.0, 0.0)), 0.25);
  EXPECT_NEAR(v.vx, 1.0 / 0.25, 1e-12);
  EXPECT_NEAR(v.vy, 0.0, 1e-12);
  EXPECT_NEAR(v.vtheta, 0.1 / 0.25, 1e-12);
  EXPECT_THROW(initial_velocity(Pose2(), 0.0), InputError);
}

}  // namespace
}  // namespace radar_slam
