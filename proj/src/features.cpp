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

#include "radar_slam/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "radar_slam/errors.hpp"

namespace radar_slam {

namespace {

bool stronger(const Keypoint &a, const Keypoint &b) {
  if (a.response != b.response) return a.response > b.response;
  if (a.pixel.y() != b.pixel.y()) return a.pixel.y() < b.pixel.y();
  return a.pixel.x() < b.pixel.x();
}

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[i + radius];
  }
  for (auto &w : k) w /= sum;
  return k;
}

Grid convolve_separable(const Grid &src, const std::vector<double> &k) {
  const int radius = static_cast<int>(k.size() / 2);
  const int h = static_cast<int>(src.rows());
  const int w = static_cast<int>(src.cols());
  Grid tmp(h, w);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i)
        acc += k[i + radius] * src(v, std::clamp(u + i, 0, w - 1));
      tmp(v, u) = acc;
    }
  Grid out(h, w);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i)
        acc += k[i + radius] * tmp(std::clamp(v + i, 0, h - 1), u);
      out(v, u) = acc;
    }
  return out;
}

double parabola_offset(double minus, double centre, double plus) {
  const double denom = minus - 2.0 * centre + plus;
  if (denom >= 0.0) return 0.0;
  return std::clamp(0.5 * (minus - plus) / denom, -0.5, 0.5);
}

// Bilinear sample with clamp-to-edge.
double sample(const Grid &g, double u, double v) {
  const int w = static_cast<int>(g.cols());
  const int h = static_cast<int>(g.rows());
  u = std::clamp(u, 0.0, w - 1.0);
  v = std::clamp(v, 0.0, h - 1.0);
  int u0 = static_cast<int>(u);
  int v0 = static_cast<int>(v);
  if (u0 > w - 2) u0 = std::max(w - 2, 0);
  if (v0 > h - 2) v0 = std::max(h - 2, 0);
  const double fu = u - u0;
  const double fv = v - v0;
  const int u1 = std::min(u0 + 1, w - 1);
  const int v1 = std::min(v0 + 1, h - 1);
  return (1 - fv) * ((1 - fu) * g(v0, u0) + fu * g(v0, u1)) +
         fv * ((1 - fu) * g(v1, u0) + fu * g(v1, u1));
}

Grid downsample(const Grid &src) {
  static const std::vector<double> k = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  const Grid blurred = convolve_separable(src, k);
  const int h = static_cast<int>((src.rows() + 1) / 2);
  const int w = static_cast<int>((src.cols() + 1) / 2);
  Grid out(h, w);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) out(v, u) = blurred(2 * v, 2 * u);
  return out;
}

struct PyramidLevel {
  Grid image;
  Grid grad_u;
  Grid grad_v;
};

// Scharr derivative, normalised to unit gain.
void scharr(const Grid &img, Grid &gu, Grid &gv) {
  const int h = static_cast<int>(img.rows());
  const int w = static_cast<int>(img.cols());
  gu = Grid::Zero(h, w);
  gv = Grid::Zero(h, w);
  auto at = [&](int v, int u) { return img(std::clamp(v, 0, h - 1), std::clamp(u, 0, w - 1)); };
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      gu(v, u) = (3.0 * (at(v - 1, u + 1) - at(v - 1, u - 1)) +
                  10.0 * (at(v, u + 1) - at(v, u - 1)) +
                  3.0 * (at(v + 1, u + 1) - at(v + 1, u - 1))) / 32.0;
      gv(v, u) = (3.0 * (at(v + 1, u - 1) - at(v - 1, u - 1)) +
                  10.0 * (at(v + 1, u) - at(v - 1, u)) +
                  3.0 * (at(v + 1, u + 1) - at(v - 1, u + 1))) / 32.0;
    }
}

std::vector<PyramidLevel> build_pyramid(const Grid &img, int levels, bool gradients) {
  std::vector<PyramidLevel> pyr(levels);
  pyr[0].image = img;
  for (int l = 1; l < levels; ++l) pyr[l].image = downsample(pyr[l - 1].image);
  if (gradients)
    for (auto &lvl : pyr) scharr(lvl.image, lvl.grad_u, lvl.grad_v);
  return pyr;
}

struct LkResult {
  Eigen::Vector2d pixel;
  bool ok;
};

LkResult lucas_kanade(const std::vector<PyramidLevel> &from, const std::vector<PyramidLevel> &to,
                      const Eigen::Vector2d &point, const Eigen::Vector2d &guess,
                      const KltOptions &opt) {
  const int levels = static_cast<int>(from.size());
  const int half = opt.window / 2;
  const int n = (2 * half + 1) * (2 * half + 1);
  std::vector<double> tmpl(n), gu(n), gv(n);

  Eigen::Vector2d g = (guess - point) / std::pow(2.0, levels - 1);
  for (int level = levels - 1; level >= 0; --level) {
    const auto &src = from[level];
    const auto &dst = to[level];
    const double scale = std::pow(2.0, -level);
    const Eigen::Vector2d p = point * scale;

    Eigen::Matrix2d G = Eigen::Matrix2d::Zero();
    int idx = 0;
    for (int dv = -half; dv <= half; ++dv)
      for (int du = -half; du <= half; ++du, ++idx) {
        const double u = p.x() + du;
        const double v = p.y() + dv;
        tmpl[idx] = sample(src.image, u, v);
        gu[idx] = sample(src.grad_u, u, v);
        gv[idx] = sample(src.grad_v, u, v);
        G(0, 0) += gu[idx] * gu[idx];
        G(0, 1) += gu[idx] * gv[idx];
        G(1, 1) += gv[idx] * gv[idx];
      }
    G(1, 0) = G(0, 1);
    const double tr = G.trace();
    const double det = G.determinant();
    const double min_eig = 0.5 * (tr - std::sqrt(std::max(tr * tr - 4.0 * det, 0.0)));
    if (min_eig / n < opt.min_eigenvalue) return {point, false};
    const Eigen::Matrix2d G_inv = G.inverse();

    Eigen::Vector2d nu = Eigen::Vector2d::Zero();
    bool converged = false;
    for (int it = 0; it < opt.max_iterations; ++it) {
      Eigen::Vector2d b = Eigen::Vector2d::Zero();
      idx = 0;
      for (int dv = -half; dv <= half; ++dv)
        for (int du = -half; du <= half; ++du, ++idx) {
          const double diff =
              tmpl[idx] - sample(dst.image, p.x() + du + g.x() + nu.x(), p.y() + dv + g.y() + nu.y());
          b.x() += diff * gu[idx];
          b.y() += diff * gv[idx];
        }
      const Eigen::Vector2d eta = G_inv * b;
      if (!eta.allFinite()) return {point, false};
      nu += eta;
      if (eta.norm() < opt.epsilon) {
        converged = true;
        break;
      }
    }
    if (level == 0) {
      if (!converged) return {point, false};
      return {point + g + nu, true};
    }
    g = 2.0 * (g + nu);
  }
  return {point, false};
}

}  // namespace

std::vector<Keypoint> detect_keypoints(const CartesianImage &img, const DetectorOptions &options) {
  const int h = img.height();
  const int w = img.width();
  if (h == 0 || w == 0) throw InputError("empty image");
  const Grid L = convolve_separable(img.intensity, gaussian_kernel(options.sigma));
  const double norm = std::pow(options.sigma, 4);
  const int margin = static_cast<int>(std::ceil(3.0 * options.sigma)) + 2;
  if (h <= 2 * margin || w <= 2 * margin) return {};

  Grid response = Grid::Zero(h, w);
  for (int v = margin - 1; v <= h - margin; ++v)
    for (int u = margin - 1; u <= w - margin; ++u) {
      const double dxx = L(v, u + 1) - 2.0 * L(v, u) + L(v, u - 1);
      const double dyy = L(v + 1, u) - 2.0 * L(v, u) + L(v - 1, u);
      const double dxy = 0.25 * (L(v + 1, u + 1) - L(v + 1, u - 1) - L(v - 1, u + 1) + L(v - 1, u - 1));
      if (dxx + dyy >= 0.0) continue;
      response(v, u) = norm * (dxx * dyy - dxy * dxy);
    }

  std::vector<Keypoint> out;
  for (int v = margin; v < h - margin; ++v)
    for (int u = margin; u < w - margin; ++u) {
      const double r = response(v, u);
      if (!(r > options.min_hessian)) continue;
      bool is_max = true;
      for (int dv = -1; dv <= 1 && is_max; ++dv)
        for (int du = -1; du <= 1; ++du) {
          if (!dv && !du) continue;
          const double n = response(v + dv, u + du);
          const bool before = dv < 0 || (dv == 0 && du < 0);
          if (n > r || (before && n == r)) {
            is_max = false;
            break;
          }
        }
      if (!is_max) continue;
      Keypoint kp;
      kp.pixel = {u + parabola_offset(response(v, u - 1), r, response(v, u + 1)),
                  v + parabola_offset(response(v - 1, u), r, response(v + 1, u))};
      kp.response = r;
      out.push_back(kp);
    }
  std::sort(out.begin(), out.end(), stronger);
  if (options.max_candidates > 0 && out.size() > static_cast<size_t>(options.max_candidates))
    out.resize(options.max_candidates);
  return out;
}

std::vector<Keypoint> detect_keypoints(const CartesianImage &img, double min_hessian) {
  DetectorOptions opt;
  opt.min_hessian = min_hessian;
  return detect_keypoints(img, opt);
}

std::vector<Keypoint> anms(const std::vector<Keypoint> &candidates, size_t target) {
  std::vector<Keypoint> sorted = candidates;
  std::sort(sorted.begin(), sorted.end(), stronger);
  if (sorted.size() <= target) return sorted;

  const size_t n = sorted.size();
  std::vector<double> radius2(n, std::numeric_limits<double>::infinity());
  for (size_t i = 1; i < n; ++i)
    for (size_t j = 0; j < i; ++j)
      radius2[i] = std::min(radius2[i], (sorted[i].pixel - sorted[j].pixel).squaredNorm());

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return radius2[a] > radius2[b]; });
  order.resize(target);
  std::sort(order.begin(), order.end());
  std::vector<Keypoint> out;
  out.reserve(target);
  for (size_t i : order) out.push_back(sorted[i]);
  return out;
}

std::vector<PointTrack> track_points(const CartesianImage &prev, const CartesianImage &next,
                                     const std::vector<Eigen::Vector2d> &points,
                                     const std::vector<Eigen::Vector2d> &guesses,
                                     const KltOptions &options) {
  if (prev.width() != next.width() || prev.height() != next.height() ||
      prev.resolution != next.resolution)
    throw InputError("KLT images must share dimensions and resolution");
  if (!guesses.empty() && guesses.size() != points.size())
    throw InputError("KLT guesses must match points");
  std::vector<PointTrack> out(points.size());
  if (points.empty()) return out;

  const auto pyr_prev = build_pyramid(prev.intensity, options.levels, true);
  const auto pyr_next = build_pyramid(next.intensity, options.levels, true);
  for (size_t i = 0; i < points.size(); ++i) {
    const Eigen::Vector2d guess = guesses.empty() ? points[i] : guesses[i];
    const auto fwd = lucas_kanade(pyr_prev, pyr_next, points[i], guess, options);
    if (!fwd.ok || !next.contains(fwd.pixel)) continue;
    const auto bwd = lucas_kanade(pyr_next, pyr_prev, fwd.pixel, points[i], options);
    if (!bwd.ok || (bwd.pixel - points[i]).norm() > options.max_fb_error) continue;
    out[i] = {fwd.pixel, true};
  }
  return out;
}

std::vector<TrackedFeature> klt_track(const CartesianImage &prev, const CartesianImage &next,
                                      const std::vector<TrackedFeature> &features,
                                      const KltOptions &options, const PolarScan *next_scan,
                                      const std::vector<Eigen::Vector2d> &predictions) {
  if (!predictions.empty() && predictions.size() != features.size())
    throw InputError("KLT predictions must match features");
  std::vector<Eigen::Vector2d> points, guesses;
  std::vector<size_t> index;
  for (size_t i = 0; i < features.size(); ++i) {
    if (!features[i].alive()) continue;
    points.push_back(features[i].pixel);
    guesses.push_back(predictions.empty() ? features[i].pixel : predictions[i]);
    index.push_back(i);
  }
  const auto tracks = track_points(prev, next, points, guesses, options);

  std::vector<TrackedFeature> out = features;
  const auto geom = next.geometry();
  for (size_t k = 0; k < index.size(); ++k) {
    auto &f = out[index[k]];
    if (!tracks[k].ok) {
      f.status = FeatureStatus::kLost;
      continue;
    }
    f.pixel = tracks[k].pixel;
    f.age += 1;
    if (next_scan) {
      try {
        f.beam_time = pixel_beam_time(f.pixel, geom, *next_scan);
      } catch (const DegenerateError &) {
        f.status = FeatureStatus::kLost;
      }
    }
  }
  return out;
}

std::vector<Keypoint> spawn_new_points(const CartesianImage &img,
                                       const std::vector<TrackedFeature> &alive, size_t target,
                                       const GridSpec &grid, const DetectorOptions &options) {
  size_t n_alive = 0;
  for (const auto &f : alive) n_alive += f.alive() ? 1 : 0;
  if (n_alive >= target) return {};
  if (grid.rows <= 0 || grid.cols <= 0) throw InputError("grid must be non-empty");

  const double cell_w = static_cast<double>(img.width()) / grid.cols;
  const double cell_h = static_cast<double>(img.height()) / grid.rows;
  auto cell_of = [&](const Eigen::Vector2d &p) {
    const int c = std::clamp(static_cast<int>(p.x() / cell_w), 0, grid.cols - 1);
    const int r = std::clamp(static_cast<int>(p.y() / cell_h), 0, grid.rows - 1);
    return r * grid.cols + c;
  };
  std::vector<int> occupancy(grid.rows * grid.cols, 0);
  for (const auto &f : alive)
    if (f.alive()) ++occupancy[cell_of(f.pixel)];
  const double low = static_cast<double>(target) / (grid.rows * grid.cols);

  std::vector<Keypoint> candidates;
  for (const auto &kp : detect_keypoints(img, options))
    if (occupancy[cell_of(kp.pixel)] < low) candidates.push_back(kp);
  return anms(candidates, target - n_alive);
}

}  // namespace radar_slam
