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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <utility>

#include "CLI11.hpp"
#include "radar_slam/config.hpp"
#include "radar_slam/errors.hpp"
#include "radar_slam/evaluation.hpp"
#include "radar_slam/io.hpp"
#include "radar_slam/simulator.hpp"
#include "radar_slam/slam_system.hpp"

namespace fs = std::filesystem;
using namespace radar_slam;

namespace {

PipelineConfig config_from(const std::string &path) {
  return path.empty() ? PipelineConfig{} : load_config(path);
}

int run_pipeline(const fs::path &sequence, const PipelineConfig &config, RunMode mode, const fs::path &out) {
  const auto names = read_manifest(sequence);
  SlamSystem slam(config, mode);
  for (size_t i = 0; i < names.size(); ++i) {
    PolarScan scan;
    try {
      scan = read_polar_scan(sequence / names[i]);
    } catch (const IoError &e) {
      throw IoError("frame " + std::to_string(i) + ": " + e.what());
    }
    slam.process(std::move(scan));
  }
  slam.finish();
  slam.write_outputs(out);
  {
    std::ofstream cfg(out / "config_used.txt");
    cfg << dump_config(config);
  }
  std::cout << "frames " << names.size() << '\n'
            << "completed " << slam.completed_frames() << '\n'
            << "keyframes " << slam.map().keyframe_count() << '\n';
  int accepted = 0;
  for (const auto &l : slam.loops()) accepted += l.accepted ? 1 : 0;
  std::cout << "loops_accepted " << accepted << '\n';
  const fs::path gt = sequence / kGroundTruthName;
  if (fs::exists(gt)) {
    try {
      const auto pairs = associate(slam.trajectory(), read_trajectory(gt));
      std::cout << "ate_rmse_m " << absolute_trajectory_error(pairs) << '\n';
    } catch (const InputError &e) {
      std::cerr << "ate unavailable: " << e.what() << '\n';
    }
  }
  return 0;
}

std::vector<SimFrame> scenario_frames(const std::string &scenario, int frames, double speed, double yaw_rate,
                                      double dt, double side, double laps) {
  if (scenario == "square") {
    const auto lap = square_loop_twists(side, speed, yaw_rate, dt);
    std::vector<Twist2> twists;
    const auto total = static_cast<size_t>(std::lround(laps * lap.size()));
    for (size_t k = 0; k < total; ++k) twists.push_back(lap[k % lap.size()]);
    return frames_from_twists(Pose2(), twists, dt);
  }
  if (frames <= 0) throw InputError("--frames must be positive");
  const double rate = scenario == "straight" || scenario == "corridor" ? 0.0 : yaw_rate;
  return frames_from_twists(Pose2(), std::vector<Twist2>(frames, Twist2(speed, 0.0, rate)), dt);
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Spinning-radar odometry and SLAM"};
  app.require_subcommand(1);

  std::string sequence, config_path, out, mode = "test", estimate_path, gt_path;
  uint64_t seed = 1;

  auto *odo = app.add_subcommand("odometry", "Run the tracker only (no loop closure)");
  odo->add_option("--sequence", sequence, "Sequence directory")->required()->check(CLI::ExistingDirectory);
  odo->add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  odo->add_option("--out", out, "Output directory")->required();
  odo->add_option("--seed", seed, "Unused; accepted for symmetry");

  auto *slam = app.add_subcommand("slam", "Run odometry with loop closure");
  slam->add_option("--sequence", sequence, "Sequence directory")->required()->check(CLI::ExistingDirectory);
  slam->add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  slam->add_option("--out", out, "Output directory")->required();
  slam->add_option("--mode", mode, "test (synchronous) or threaded")->check(CLI::IsMember({"test", "threaded"}));
  slam->add_option("--seed", seed, "Unused; accepted for symmetry");

  std::string scenario = "circle";
  int frames = 50;
  double speed = 10.0, yaw_rate = 0.2, side = 50.0, laps = 1.0, multipath = 0.0, speckle = 4.0;
  auto *sim = app.add_subcommand("simulate", "Render a synthetic sequence");
  sim->add_option("--out", out, "Output sequence directory")->required();
  sim->add_option("--seed", seed, "Random seed");
  sim->add_option("--scenario", scenario, "straight, circle, square or corridor")
      ->check(CLI::IsMember({"straight", "circle", "square", "corridor"}));
  sim->add_option("--frames", frames, "Number of scans (ignored for square)");
  sim->add_option("--speed", speed, "Forward speed, m/s");
  sim->add_option("--yaw-rate", yaw_rate, "Yaw rate, rad/s");
  sim->add_option("--side", side, "Square side length, m");
  sim->add_option("--laps", laps, "Number of laps around the square");
  sim->add_option("--speckle", speckle, "Speckle noise std");
  sim->add_option("--multipath", multipath, "Multipath ghost gain");

  auto *eval = app.add_subcommand("evaluate", "Score a trajectory against ground truth");
  eval->add_option("--sequence", sequence, "Sequence directory holding ground_truth.txt");
  eval->add_option("--ground-truth", gt_path, "Ground-truth trajectory file");
  eval->add_option("--estimate", estimate_path, "Estimated trajectory file")->required()->check(CLI::ExistingFile);
  eval->add_option("--out", out, "Report file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (odo->parsed()) {
      PipelineConfig config = config_from(config_path);
      config.loop_closure = false;
      return run_pipeline(sequence, config, RunMode::kTest, out);
    }
    if (slam->parsed())
      return run_pipeline(sequence, config_from(config_path), mode == "threaded" ? RunMode::kThreaded : RunMode::kTest,
                          out);
    if (sim->parsed()) {
      SimulatorConfig cfg;
      cfg.seed = seed;
      cfg.speckle_std = speckle;
      cfg.multipath_gain = multipath;
      const auto f = scenario_frames(scenario, frames, speed, yaw_rate, cfg.scan_period, side, laps);
      Eigen::Vector2d lo(1e9, 1e9), hi(-1e9, -1e9);
      for (const auto &fr : f) {
        lo = lo.cwiseMin(fr.pose.translation());
        hi = hi.cwiseMax(fr.pose.translation());
      }
      const double margin = 100.0;
      const ReflectorWorld world =
          scenario == "corridor"
              ? make_corridor_world(speed * frames * cfg.scan_period, 6.0, seed)
              : make_clutter_world(lo.array() - margin, hi.array() + margin,
                                   static_cast<int>(((hi - lo).array() + 2 * margin).prod() / 100.0), seed);
      generate_sequence(out, world, f, cfg);
      std::cout << "wrote " << f.size() << " scans to " << out << '\n';
      return 0;
    }
    if (eval->parsed()) {
      if (gt_path.empty() && sequence.empty()) throw InputError("evaluate needs --sequence or --ground-truth");
      const fs::path gt = gt_path.empty() ? fs::path(sequence) / kGroundTruthName : fs::path(gt_path);
      const auto estimate = read_trajectory(estimate_path);
      const auto reference = read_trajectory(gt);
      const auto pairs = associate(estimate, reference);
      RelativeError rel;
      try {
        rel = relative_error(pairs);
      } catch (const InputError &e) {
        std::cerr << "relative error unavailable: " << e.what() << '\n';
      }
      const std::string report = format_report(rel, absolute_trajectory_error(pairs),
                                               completion_percentage(static_cast<int>(pairs.size()),
                                                                     static_cast<int>(reference.size())));
      if (out.empty()) {
        std::cout << report;
      } else {
        std::ofstream(out) << report;
      }
      return 0;
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
