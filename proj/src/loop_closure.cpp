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

#include "radar_slam/loop_closure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <unordered_map>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "radar_slam/errors.hpp"
#include "radar_slam/features.hpp"
#include "radar_slam/outlier_rejection.hpp"

namespace radar_slam {

std::vector<int> find_peaks(const Eigen::Ref<const Eigen::RowVectorXd> &signal, double min_prominence,
                            int min_distance) {
  const int n = static_cast<int>(signal.size());
  std::vector<int> peaks;
  int i = 1;
  while (i < n - 1) {
    if (signal(i) > signal(i - 1)) {
      int j = i;
      while (j + 1 < n && signal(j + 1) == signal(i)) ++j;
      if (j + 1 < n && signal(j + 1) < signal(i)) peaks.push_back((i + j) / 2);
      i = j + 1;
    } else {
      ++i;
    }
  }

  std::vector<int> prominent;
  for (int p : peaks) {
    const double h = signal(p);
    double left_min = h, right_min = h;
    for (int k = p - 1; k >= 0 && signal(k) <= h; --k) left_min = std::min(left_min, signal(k));
    for (int k = p + 1; k < n && signal(k) <= h; ++k) right_min = std::min(right_min, signal(k));
    if (h - std::max(left_min, right_min) >= min_prominence) prominent.push_back(p);
  }
  if (min_distance <= 1 || prominent.size() < 2) return prominent;

  std::vector<size_t> order(prominent.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return signal(prominent[a]) > signal(prominent[b]); });
  std::vector<char> keep(prominent.size(), 1);
  for (size_t idx : order) {
    if (!keep[idx]) continue;
    for (size_t other = 0; other < prominent.size(); ++other)
      if (other != idx && keep[other] && std::abs(prominent[other] - prominent[idx]) < min_distance)
        keep[other] = 0;
  }
  std::vector<int> out;
  for (size_t k = 0; k < prominent.size(); ++k)
    if (keep[k]) out.push_back(prominent[k]);
  return out;
}

PointCloud2D extract_point_cloud(const PolarScan &scan, const LoopClosureConfig &config, const Twist2 *twist) {
  scan.validate();
  PointCloud2D cloud;
  const int max_bin = std::min(scan.n_range_bins() - 1,
                               static_cast<int>(std::floor(config.max_range / scan.range_resolution)));
  for (int a = 0; a < scan.n_azimuths(); ++a) {
    const auto row = scan.power.row(a).head(max_bin + 1);
    const std::vector<int> peaks = find_peaks(row, config.peak_prominence, config.peak_distance);
    if (peaks.empty()) continue;
    double mean = 0.0, peak_max = 0.0;
    for (int p : peaks) {
      mean += row(p);
      peak_max = std::max(peak_max, std::abs(row(p)));
    }
    mean /= peaks.size();
    double var = 0.0;
    for (int p : peaks) var += (row(p) - mean) * (row(p) - mean);
    const double threshold = mean + std::sqrt(var / peaks.size()) - 1e-12 * peak_max;
    const double t = twist ? azimuth_beam_time(a, scan) : 0.0;
    const Pose2 comp = twist ? exp_twist(*twist, t) : Pose2();
    for (int p : peaks) {
      if (row(p) < threshold) continue;
      const Eigen::Vector3d q = polar_point_to_metric({a, static_cast<double>(p)}, scan);
      cloud.points.push_back(comp.act(Eigen::Vector2d(q.x(), q.y())));
    }
  }
  return cloud;
}

PcaSummary pca_gate(const PointCloud2D &cloud, double max_ratio) {
  PcaSummary out;
  out.ratio = std::numeric_limits<double>::infinity();
  if (cloud.size() < 2) return out;
  for (const auto &p : cloud.points) out.centroid += p;
  out.centroid /= static_cast<double>(cloud.size());
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto &p : cloud.points) cov += (p - out.centroid) * (p - out.centroid).transpose();
  cov /= static_cast<double>(cloud.size());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
  const double g1 = eig.eigenvalues()(1), g2 = eig.eigenvalues()(0);
  const Eigen::Vector2d axis = eig.eigenvectors().col(1);
  out.principal_angle = std::atan2(axis.y(), axis.x());
  if (g1 <= 0.0) return out;
  if (g2 > 1e-12 * g1) out.ratio = g1 / g2;
  out.accepted = out.ratio < max_ratio;
  return out;
}

namespace {

// Row-normalised ring x sector density matrix -> [u1; v1], unit norm.
Eigen::VectorXd density_signature(const std::vector<Eigen::Vector2d> &pts, double sx, double sy,
                                  const LoopClosureConfig &config) {
  const double r2 = config.descriptor_radius * config.descriptor_radius;
  Eigen::MatrixXd hist = Eigen::MatrixXd::Zero(config.rings, config.sectors);
  for (const auto &q : pts) {
    const Eigen::Vector2d p(sx * q.x(), sy * q.y());
    const double d2 = p.squaredNorm();
    if (d2 >= r2) continue;
    const int ring = std::min(config.rings - 1, static_cast<int>(config.rings * d2 / r2));
    double ang = std::atan2(p.y(), p.x());
    if (ang < 0.0) ang += 2.0 * std::numbers::pi;
    const int sector =
        std::min(config.sectors - 1, static_cast<int>(config.sectors * ang / (2.0 * std::numbers::pi)));
    hist(ring, sector) += 1.0;
  }
  for (int r = 0; r < config.rings; ++r) {
    const double s = hist.row(r).sum();
    if (s > 0.0) hist.row(r) /= s;
  }
  if (hist.sum() <= 0.0) return {};

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(hist, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd u = svd.matrixU().col(0);
  Eigen::VectorXd v = svd.matrixV().col(0);
  Eigen::VectorXd out(u.size() + v.size());
  out << u, v;
  for (int k = 0; k < out.size(); ++k)
    if (std::abs(out(k)) > 1e-12) {
      if (out(k) < 0.0) out = -out;
      break;
    }
  return out.normalized();
}

bool lexicographically_less(const Eigen::VectorXd &a, const Eigen::VectorXd &b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

}  // namespace

PlaceDescriptor compute_descriptor(const PointCloud2D &cloud, const LoopClosureConfig &config) {
  PlaceDescriptor desc;
  if (config.rings <= 0 || config.sectors <= 0 || !(config.descriptor_radius > 0.0))
    throw InputError("descriptor dimensions must be positive");
  const PcaSummary pca = pca_gate(cloud, std::numeric_limits<double>::infinity());
  if (cloud.size() < 3 || !std::isfinite(pca.ratio)) return desc;

  const Eigen::Matrix2d rot = rotation_matrix(-pca.principal_angle);
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(cloud.size());
  Eigen::Vector2d m2 = Eigen::Vector2d::Zero(), m3 = Eigen::Vector2d::Zero();
  for (const auto &p : cloud.points) {
    pts.push_back(rot * (p - pca.centroid));
    m2 += pts.back().cwiseAbs2();
    m3 += pts.back().cwiseAbs2().cwiseProduct(pts.back());
  }
  // Axis signs: positive skewness; ambiguous axes try both signs.
  std::vector<double> xs, ys;
  for (int axis = 0; axis < 2; ++axis) {
    auto &signs = axis == 0 ? xs : ys;
    const double n = static_cast<double>(pts.size());
    const double skew = m2(axis) > 0.0 ? (m3(axis) / n) / std::pow(m2(axis) / n, 1.5) : 0.0;
    if (std::abs(skew) < 1e-9) {
      signs = {1.0, -1.0};
    } else {
      signs = {skew > 0.0 ? 1.0 : -1.0};
    }
  }
  for (double sx : xs)
    for (double sy : ys) {
      const Eigen::VectorXd sig = density_signature(pts, sx, sy, config);
      if (sig.size() == 0) continue;
      if (desc.degenerate || lexicographically_less(desc.vector, sig)) {
        desc.vector = sig;
        desc.degenerate = false;
      }
    }
  return desc;
}

double descriptor_distance(const PlaceDescriptor &a, const PlaceDescriptor &b) {
  if (a.degenerate || b.degenerate || a.vector.size() != b.vector.size())
    return std::numeric_limits<double>::infinity();
  return (a.vector - b.vector).norm();
}

std::optional<LoopCandidate> find_loop_candidate(const Keyframe &query, const std::vector<Keyframe> &history,
                                                 const LoopClosureConfig &config) {
  if (!query.pca_accepted || query.descriptor.degenerate) return std::nullopt;
  std::optional<LoopCandidate> best;
  for (const auto &kf : history) {
    if (kf.id >= query.id - config.temporal_gap || !kf.pca_accepted) continue;
    const double d = descriptor_distance(query.descriptor, kf.descriptor);
    if (!(d < config.descriptor_threshold)) continue;
    if (!best || d < best->distance || (d == best->distance && kf.id < best->match))
      best = LoopCandidate{query.id, kf.id, d};
  }
  return best;
}

CartesianImage rotate_image(const CartesianImage &image, double angle) {
  const CartesianGeometry geom = image.geometry();
  CartesianImage out = image;
  out.intensity.setZero();
  const Eigen::Matrix2d back = rotation_matrix(-angle);
  const int w = image.width(), h = image.height();
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      const Eigen::Vector2d src = metric_to_pixel(Eigen::Vector2d(back * pixel_to_metric({u, v}, geom)), geom);
      const int u0 = static_cast<int>(std::floor(src.x())), v0 = static_cast<int>(std::floor(src.y()));
      if (u0 < 0 || v0 < 0 || u0 + 1 >= w || v0 + 1 >= h) continue;
      const double fu = src.x() - u0, fv = src.y() - v0;
      out.intensity(v, u) = (1 - fv) * ((1 - fu) * image.intensity(v0, u0) + fu * image.intensity(v0, u0 + 1)) +
                            fv * ((1 - fu) * image.intensity(v0 + 1, u0) + fu * image.intensity(v0 + 1, u0 + 1));
    }
  return out;
}

namespace {

// Uniform hash grid for fixed-radius nearest-neighbour queries.
class NeighbourGrid {
 public:
  NeighbourGrid(const std::vector<Eigen::Vector2d> &points, double cell) : points_(points), cell_(cell) {
    for (size_t i = 0; i < points.size(); ++i) cells_[key(cell_of(points[i]))].push_back(static_cast<int>(i));
  }

  /// Index of the nearest point within `radius` (<= cell size), or -1.
  int nearest(const Eigen::Vector2d &p, double radius, double &dist2) const {
    const Eigen::Vector2i c = cell_of(p);
    int best = -1;
    dist2 = radius * radius;
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy) {
        const auto it = cells_.find(key({c.x() + dx, c.y() + dy}));
        if (it == cells_.end()) continue;
        for (int i : it->second) {
          const double d2 = (points_[i] - p).squaredNorm();
          if (d2 < dist2 || (d2 == dist2 && best >= 0 && i < best)) {
            dist2 = d2;
            best = i;
          }
        }
      }
    return best;
  }

 private:
  Eigen::Vector2i cell_of(const Eigen::Vector2d &p) const {
    return {static_cast<int>(std::floor(p.x() / cell_)), static_cast<int>(std::floor(p.y() / cell_))};
  }
  static int64_t key(const Eigen::Vector2i &c) {
    return (static_cast<int64_t>(c.x()) << 32) ^ static_cast<uint32_t>(c.y());
  }

  const std::vector<Eigen::Vector2d> &points_;
  double cell_;
  std::unordered_map<int64_t, std::vector<int>> cells_;
};

}  // namespace

IcpResult icp(const PointCloud2D &source, const PointCloud2D &target, const Pose2 &initial,
              const LoopClosureConfig &config) {
  IcpResult out;
  out.transform = initial;
  if (source.empty() || target.empty()) return out;
  const double gate = config.icp_inlier_distance;
  const NeighbourGrid grid(target.points, gate);

  auto match = [&](const Pose2 &t, std::vector<Eigen::Vector2d> &src, std::vector<Eigen::Vector2d> &dst,
                   double &truncated, double &inlier_sum) {
    src.clear();
    dst.clear();
    truncated = 0.0;
    inlier_sum = 0.0;
    for (const auto &p : source.points) {
      double d2;
      const int j = grid.nearest(t.act(p), gate, d2);
      if (j < 0) {
        truncated += gate * gate;
        continue;
      }
      truncated += d2;
      inlier_sum += std::sqrt(d2);
      src.push_back(p);
      dst.push_back(target.points[j]);
    }
    truncated /= static_cast<double>(source.size());
  };

  std::vector<Eigen::Vector2d> src, dst;
  double truncated = 0.0, inlier_sum = 0.0;
  for (int it = 0; it < config.icp_max_iterations; ++it) {
    match(out.transform, src, dst, truncated, inlier_sum);
    out.cost_history.push_back(truncated);
    if (src.size() < 3) break;
    Pose2 next;
    try {
      next = rigid_fit_svd(src, dst);
    } catch (const DegenerateError &) {
      break;
    }
    ++out.iterations;
    const Pose2 step = out.transform.inverse() * next;
    out.transform = next;
    if (step.translation().norm() < config.icp_tolerance && std::abs(step.angle()) < config.icp_tolerance) {
      out.converged = true;
      break;
    }
  }
  match(out.transform, src, dst, truncated, inlier_sum);
  out.cost_history.push_back(truncated);
  out.inlier_fraction = static_cast<double>(src.size()) / source.size();
  out.mean_residual = src.empty() ? std::numeric_limits<double>::infinity() : inlier_sum / src.size();
  return out;
}

namespace {

// Seed for one rotation hypothesis: KLT from the match image into the
// rotated query image, clique filtering and an SVD fit.
Pose2 seed_hypothesis(const CartesianImage &match_img, const std::vector<Eigen::Vector2d> &match_pts,
                      const CartesianImage &query_img, double rotation, const PcaSummary &pq,
                      const PcaSummary &pm, const LoopClosureConfig &config, int &clique_size) {
  const CartesianGeometry geom = match_img.geometry();
  const CartesianImage rotated = rotate_image(query_img, rotation);
  const std::vector<PointTrack> tracks = track_points(match_img, rotated, match_pts);
  std::vector<Eigen::Vector2d> pix_m, pix_q;
  for (size_t k = 0; k < tracks.size(); ++k)
    if (tracks[k].ok) {
      pix_m.push_back(match_pts[k]);
      pix_q.push_back(tracks[k].pixel);
    }
  clique_size = 0;
  const Pose2 fallback(rotation, pm.centroid - rotation_matrix(rotation) * pq.centroid);
  if (pix_m.size() < 3) return fallback;
  const std::vector<int> clique =
      maximum_clique(build_consistency_graph(pix_q, pix_m, config.clique_threshold));
  clique_size = static_cast<int>(clique.size());
  if (clique.size() < 3) return fallback;
  std::vector<Eigen::Vector2d> src, dst;
  for (int k : clique) {
    src.push_back(pixel_to_metric(pix_q[k], geom));
    dst.push_back(pixel_to_metric(pix_m[k], geom));
  }
  try {
    return rigid_fit_svd(src, dst) * Pose2(rotation, Eigen::Vector2d::Zero());
  } catch (const DegenerateError &) {
    return fallback;
  }
}

}  // namespace

std::vector<double> sweep_rotations(const PointCloud2D &query, const PointCloud2D &match,
                                    const LoopClosureConfig &config) {
  if (!(config.rotation_sweep_step > 0.0) || config.rotation_sweep_hypotheses <= 0 || query.size() < 3 ||
      match.size() < 3)
    return {};
  const PcaSummary pq = pca_gate(query, std::numeric_limits<double>::infinity());
  const PcaSummary pm = pca_gate(match, std::numeric_limits<double>::infinity());
  const double gate = config.icp_inlier_distance;
  const NeighbourGrid grid(match.points, gate);
  const int steps = std::max(1, static_cast<int>(std::round(2.0 * std::numbers::pi / config.rotation_sweep_step)));
  std::vector<std::pair<int, int>> scores;
  for (int k = 0; k < steps; ++k) {
    const double angle = normalize_angle(2.0 * std::numbers::pi * k / steps);
    const Pose2 t(angle, pm.centroid - rotation_matrix(angle) * pq.centroid);
    int hits = 0;
    double d2;
    for (const auto &p : query.points) hits += grid.nearest(t.act(p), gate, d2) >= 0 ? 1 : 0;
    scores.push_back({hits, k});
  }
  std::stable_sort(scores.begin(), scores.end(), [](const auto &a, const auto &b) { return a.first > b.first; });
  std::vector<int> chosen;
  for (const auto &[hits, k] : scores) {
    if (static_cast<int>(chosen.size()) >= config.rotation_sweep_hypotheses) break;
    bool near = false;
    for (int c : chosen) {
      const int d = std::abs(c - k);
      near = near || std::min(d, steps - d) < 3;
    }
    if (!near) chosen.push_back(k);
  }
  std::vector<double> out;
  for (int k : chosen) out.push_back(normalize_angle(2.0 * std::numbers::pi * k / steps));
  return out;
}

LoopVerification verify_and_estimate(const Keyframe &query, const Keyframe &match, const CartesianGeometry &geom,
                                     const LoopClosureConfig &config) {
  LoopVerification out;
  const PcaSummary pq = pca_gate(query.cloud, config.pca_ratio_max);
  const PcaSummary pm = pca_gate(match.cloud, config.pca_ratio_max);
  if (query.cloud.size() < 3 || match.cloud.size() < 3 || !query.scan || !match.scan) return out;
  const CartesianImage img_q = polar_to_cartesian(*query.scan, geom, config.max_range);
  const CartesianImage img_m = polar_to_cartesian(*match.scan, geom, config.max_range);
  std::vector<Eigen::Vector2d> match_pts;
  for (const auto &kp : anms(detect_keypoints(img_m), config.verification_keypoints)) match_pts.push_back(kp.pixel);

  const double base = normalize_angle(pm.principal_angle - pq.principal_angle);
  bool have = false;
  std::vector<double> hypotheses = {base, normalize_angle(base + std::numbers::pi)};
  for (double r : sweep_rotations(query.cloud, match.cloud, config)) hypotheses.push_back(r);
  for (double rotation : hypotheses) {
    int clique_size = 0;
    const Pose2 seed = seed_hypothesis(img_m, match_pts, img_q, rotation, pq, pm, config, clique_size);
    const IcpResult res = icp(query.cloud, match.cloud, seed, config);
    const bool better = !have || res.inlier_fraction > out.inlier_fraction ||
                        (res.inlier_fraction == out.inlier_fraction && res.mean_residual < out.mean_residual);
    if (better) {
      have = true;
      out.relative = res.transform;
      out.mean_residual = res.mean_residual;
      out.inlier_fraction = res.inlier_fraction;
      out.clique_size = clique_size;
      out.pca_rotation = rotation;
    }
  }
  out.accepted = out.mean_residual < config.max_mean_residual && out.inlier_fraction > config.min_inlier_fraction;
  out.information = out.inlier_fraction * config.base_information;
  return out;
}

}  // namespace radar_slam
