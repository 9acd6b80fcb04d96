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

#include "radar_slam/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "radar_slam/errors.hpp"

namespace radar_slam {

namespace {

double to_double(const std::string &key, const std::string &v) {
  size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used == 0 || used != v.size() || !std::isfinite(out))
    throw InputError("config key '" + key + "': '" + v + "' is not a finite number");
  return out;
}

int to_int(const std::string &key, const std::string &v) {
  const double d = to_double(key, v);
  if (d != std::floor(d) || std::abs(d) > 1e9) throw InputError("config key '" + key + "': '" + v + "' is not an integer");
  return static_cast<int>(d);
}

bool to_bool(const std::string &key, const std::string &v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw InputError("config key '" + key + "': '" + v + "' is not a boolean");
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

struct Entry {
  const char *key;
  std::function<void(PipelineConfig &, const std::string &)> set;
  std::function<std::string(const PipelineConfig &)> get;
};

#define RS_DOUBLE(name, field)                                                                    \
  Entry {                                                                                         \
    name, [](PipelineConfig &c, const std::string &v) { c.field = to_double(name, v); },          \
        [](const PipelineConfig &c) { return fmt(c.field); }                                      \
  }
#define RS_INT(name, field)                                                                       \
  Entry {                                                                                         \
    name, [](PipelineConfig &c, const std::string &v) { c.field = to_int(name, v); },             \
        [](const PipelineConfig &c) { return std::to_string(c.field); }                           \
  }
#define RS_BOOL(name, field)                                                                      \
  Entry {                                                                                         \
    name, [](PipelineConfig &c, const std::string &v) { c.field = to_bool(name, v); },            \
        [](const PipelineConfig &c) { return std::string(c.field ? "true" : "false"); }           \
  }

const std::vector<Entry> &entries() {
  static const std::vector<Entry> table = {
      RS_DOUBLE("cartesian_resolution", cartesian_resolution),
      RS_INT("cartesian_size", cartesian_size),
      RS_DOUBLE("max_range", max_range),
      RS_DOUBLE("detector.min_hessian", detector.min_hessian),
      RS_DOUBLE("detector.sigma", detector.sigma),
      RS_INT("detector.max_candidates", detector.max_candidates),
      RS_INT("klt.levels", klt.levels),
      RS_INT("klt.window", klt.window),
      RS_INT("klt.max_iterations", klt.max_iterations),
      RS_DOUBLE("klt.epsilon", klt.epsilon),
      RS_DOUBLE("klt.max_fb_error", klt.max_fb_error),
      RS_DOUBLE("klt.min_eigenvalue", klt.min_eigenvalue),
      RS_INT("grid.rows", grid.rows),
      RS_INT("grid.cols", grid.cols),
      RS_INT("feature_target", feature_target),
      RS_INT("respawn_below", respawn_below),
      RS_DOUBLE("clique_threshold", clique_threshold),
      RS_BOOL("beam_time_compensation", beam_time_compensation),
      RS_DOUBLE("max_feature_residual", max_feature_residual),
      RS_DOUBLE("estimator.velocity_information_x", estimator.velocity_information(0, 0)),
      RS_DOUBLE("estimator.velocity_information_y", estimator.velocity_information(1, 1)),
      RS_DOUBLE("estimator.velocity_information_theta", estimator.velocity_information(2, 2)),
      RS_DOUBLE("estimator.cauchy_scale", estimator.cauchy_scale),
      RS_INT("estimator.max_iterations", estimator.max_iterations),
      RS_DOUBLE("estimator.convergence_tol", estimator.convergence_tol),
      RS_DOUBLE("estimator.lm_initial_damping", estimator.lm_initial_damping),
      RS_DOUBLE("keyframe.distance", keyframe.distance),
      RS_DOUBLE("keyframe.rotation", keyframe.rotation),
      RS_INT("keyframe.min_tracked", keyframe.min_tracked),
      RS_BOOL("loop_closure", loop_closure),
      RS_DOUBLE("loop.peak_prominence", loop.peak_prominence),
      RS_INT("loop.peak_distance", loop.peak_distance),
      RS_DOUBLE("loop.max_range", loop.max_range),
      RS_INT("loop.rings", loop.rings),
      RS_INT("loop.sectors", loop.sectors),
      RS_DOUBLE("loop.descriptor_radius", loop.descriptor_radius),
      RS_DOUBLE("loop.pca_ratio_max", loop.pca_ratio_max),
      RS_INT("loop.temporal_gap", loop.temporal_gap),
      RS_DOUBLE("loop.descriptor_threshold", loop.descriptor_threshold),
      RS_INT("loop.verification_keypoints", loop.verification_keypoints),
      RS_DOUBLE("loop.rotation_sweep_step", loop.rotation_sweep_step),
      RS_INT("loop.rotation_sweep_hypotheses", loop.rotation_sweep_hypotheses),
      RS_DOUBLE("loop.clique_threshold", loop.clique_threshold),
      RS_INT("loop.icp_max_iterations", loop.icp_max_iterations),
      RS_DOUBLE("loop.icp_tolerance", loop.icp_tolerance),
      RS_DOUBLE("loop.icp_inlier_distance", loop.icp_inlier_distance),
      RS_DOUBLE("loop.max_mean_residual", loop.max_mean_residual),
      RS_DOUBLE("loop.min_inlier_fraction", loop.min_inlier_fraction),
      RS_DOUBLE("loop.information_x", loop.base_information(0, 0)),
      RS_DOUBLE("loop.information_y", loop.base_information(1, 1)),
      RS_DOUBLE("loop.information_theta", loop.base_information(2, 2)),
      RS_INT("graph.max_iterations", graph.max_iterations),
      RS_DOUBLE("graph.relative_tolerance", graph.relative_tolerance),
      RS_DOUBLE("graph.initial_damping", graph.initial_damping),
      RS_INT("graph.dense_limit", graph.dense_limit),
      RS_DOUBLE("odometry_information_x", odometry_information(0, 0)),
      RS_DOUBLE("odometry_information_y", odometry_information(1, 1)),
      RS_DOUBLE("odometry_information_theta", odometry_information(2, 2)),
      RS_DOUBLE("odometry_yaw_bias", odometry_yaw_bias),
  };
  return table;
}

#undef RS_DOUBLE
#undef RS_INT
#undef RS_BOOL

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void PipelineConfig::validate() const {
  auto require = [](bool ok, const char *what) {
    if (!ok) throw InputError(std::string("invalid config: ") + what);
  };
  require(cartesian_resolution > 0.0, "cartesian_resolution must be positive");
  require(cartesian_size > 0, "cartesian_size must be positive");
  require(max_range > 0.0, "max_range must be positive");
  require(detector.sigma > 0.0, "detector.sigma must be positive");
  require(klt.levels >= 1 && klt.window >= 3, "klt.levels >= 1 and klt.window >= 3");
  require(grid.rows > 0 && grid.cols > 0, "grid dimensions must be positive");
  require(feature_target > 0 && respawn_below >= 0, "feature counts must be positive");
  require(clique_threshold > 0.0, "clique_threshold must be positive");
  require(estimator.max_iterations > 0, "estimator.max_iterations must be positive");
  require(keyframe.distance > 0.0 && keyframe.rotation > 0.0, "keyframe thresholds must be positive");
  require(loop.rings > 0 && loop.sectors > 0, "descriptor dimensions must be positive");
  require(loop.temporal_gap >= 0, "loop.temporal_gap must be non-negative");
  require(loop.icp_inlier_distance > 0.0, "loop.icp_inlier_distance must be positive");
  require(graph.max_iterations > 0, "graph.max_iterations must be positive");
  require((odometry_information.diagonal().array() > 0.0).all(), "odometry information must be positive");
  require((loop.base_information.diagonal().array() > 0.0).all(), "loop information must be positive");
}

void set_config_value(PipelineConfig &config, const std::string &key, const std::string &value) {
  for (const auto &e : entries())
    if (key == e.key) {
      e.set(config, value);
      return;
    }
  throw InputError("unknown config key '" + key + "'");
}

PipelineConfig parse_config(const std::string &text) {
  PipelineConfig config;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InputError("config line " + std::to_string(number) + ": expected 'key = value'");
    try {
      set_config_value(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const InputError &err) {
      throw InputError("config line " + std::to_string(number) + ": " + err.what());
    }
  }
  config.validate();
  return config;
}

PipelineConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const PipelineConfig &config) {
  std::ostringstream ss;
  for (const auto &e : entries()) ss << e.key << " = " << e.get(config) << '\n';
  return ss.str();
}

}  // namespace radar_slam
