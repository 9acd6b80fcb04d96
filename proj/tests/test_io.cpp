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


#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "radar_slam/errors.hpp"
#include "radar_slam/io.hpp"
#include "test_util.hpp"

namespace radar_slam {
namespace {

PolarScan sample_scan(bool with_stamps) {
  PolarScan scan;
  scan.power = Grid(8, 5);
  for (int a = 0; a < 8; ++a)
    for (int r = 0; r < 5; ++r) scan.power(a, r) = (a * 31 + r * 7) % 256;
  scan.range_resolution = 0.0438;
  scan.scan_period = 0.25;
  scan.stamp = 1234.5;
  if (with_stamps)
    for (int a = 0; a < 8; ++a) scan.azimuth_stamps.push_back(1234.4 + 0.03 * a);
  return scan;
}

void expect_equal(const PolarScan &a, const PolarScan &b) {
  EXPECT_EQ(a.power, b.power);
  EXPECT_EQ(a.range_resolution, b.range_resolution);
  EXPECT_EQ(a.scan_period, b.scan_period);
  EXPECT_EQ(a.stamp, b.stamp);
  EXPECT_EQ(a.azimuth_stamps, b.azimuth_stamps);
}

TEST(PolarScanFile, RoundTrip) {
  const auto dir = testing_util::scratch_dir("io_roundtrip");
  for (bool stamps : {false, true}) {
    const PolarScan scan = sample_scan(stamps);
    write_polar_scan(dir / "s.rps", scan);
    expect_equal(read_polar_scan(dir / "s.rps"), scan);
  }
}

TEST(PolarScanFile, EncodeClampsAndRounds) {
  PolarScan scan = sample_scan(false);
  scan.power(0, 0) = 300.0;
  scan.power(0, 1) = 12.6;
  const PolarScan back = decode_polar_scan(encode_polar_scan(scan));
  EXPECT_EQ(back.power(0, 0), 255.0);
  EXPECT_EQ(back.power(0, 1), 13.0);
}

TEST(PolarScanFile, BadMagic) {
  auto bytes = encode_polar_scan(sample_scan(false));
  bytes[0] = 'X';
  EXPECT_THROW(decode_polar_scan(bytes), IoError);
}

TEST(PolarScanFile, TruncatedFileNamesPath) {
  const auto dir = testing_util::scratch_dir("io_truncated");
  auto bytes = encode_polar_scan(sample_scan(false));
  bytes.resize(bytes.size() - 3);
  {
    std::ofstream out(dir / "broken.rps", std::ios::binary);
    out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  try {
    read_polar_scan(dir / "broken.rps");
    FAIL() << "expected IoError";
  } catch (const IoError &e) {
    EXPECT_NE(std::string(e.what()).find("broken.rps"), std::string::npos);
  }
}

TEST(PolarScanFile, MissingFile) {
  const auto dir = testing_util::scratch_dir("io_missing");
  EXPECT_THROW(read_polar_scan(dir / "nope.rps"), IoError);
}

TEST(Manifest, RoundTrip) {
  const auto dir = testing_util::scratch_dir("io_manifest");
  const std::vector<std::string> names = {"a.rps", "b.rps", "c.rps"};
  write_manifest(dir, names);
  EXPECT_EQ(read_manifest(dir), names);
  write_manifest(dir, {});
  EXPECT_TRUE(read_manifest(dir).empty());
}

TEST(Trajectory, RoundTrip) {
  const auto dir = testing_util::scratch_dir("io_traj");
  const Trajectory t = {{0.0, Pose2(1.0, 2.0, 0.3)}, {0.25, Pose2(-1.5, 4.0, -3.0)}};
  write_trajectory(dir / "t.txt", t);
  const Trajectory back = read_trajectory(dir / "t.txt");
  ASSERT_EQ(back.size(), t.size());
  for (size_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(back[i].stamp, t[i].stamp);
    EXPECT_EQ(back[i].pose.x(), t[i].pose.x());
    EXPECT_EQ(back[i].pose.y(), t[i].pose.y());
    EXPECT_EQ(back[i].pose.angle(), t[i].pose.angle());
  }
}

TEST(Trajectory, MalformedLine) {
  const auto dir = testing_util::scratch_dir("io_traj_bad");
  {
    std::ofstream out(dir / "t.txt");
    out << "0 0 0 0\n1 2 x\n";
  }
  EXPECT_THROW(read_trajectory(dir / "t.txt"), IoError);
}

}  // namespace
}  // namespace radar_slam
