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

#include "radar_slam/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <sstream>

#include "radar_slam/errors.hpp"

namespace radar_slam {

namespace {

constexpr char kMagic[4] = {'R', 'P', 'S', '1'};
constexpr size_t kHeaderSize = 4 + 4 + 4 + 8 + 8 + 8 + 1;

void put_u32(std::vector<unsigned char> &out, uint32_t value) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(value >> (8 * i)));
}

void put_f64(std::vector<unsigned char> &out, double value) {
  const auto bits = std::bit_cast<uint64_t>(value);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(bits >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(const std::vector<unsigned char> &bytes) : bytes_(bytes) {}

  void need(size_t n) const {
    if (pos_ + n > bytes_.size()) throw IoError("truncated polar scan");
  }
  uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }
  double f64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(bytes_[pos_++]) << (8 * i);
    return std::bit_cast<double>(v);
  }
  size_t remaining() const { return bytes_.size() - pos_; }

 private:
  const std::vector<unsigned char> &bytes_;
  size_t pos_ = 0;
};

}  // namespace

std::vector<unsigned char> encode_polar_scan(const PolarScan &scan) {
  std::vector<unsigned char> out;
  const size_t n = static_cast<size_t>(scan.n_azimuths()) * scan.n_range_bins();
  out.reserve(kHeaderSize + 8 * scan.azimuth_stamps.size() + n);
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_u32(out, static_cast<uint32_t>(scan.n_azimuths()));
  put_u32(out, static_cast<uint32_t>(scan.n_range_bins()));
  put_f64(out, scan.range_resolution);
  put_f64(out, scan.scan_period);
  put_f64(out, scan.stamp);
  out.push_back(scan.azimuth_stamps.empty() ? 0 : 1);
  for (double s : scan.azimuth_stamps) put_f64(out, s);
  for (int a = 0; a < scan.n_azimuths(); ++a)
    for (int r = 0; r < scan.n_range_bins(); ++r)
      out.push_back(static_cast<unsigned char>(std::clamp(std::lround(scan.power(a, r)), 0L, 255L)));
  return out;
}

PolarScan decode_polar_scan(const std::vector<unsigned char> &bytes) {
  if (bytes.size() < kHeaderSize || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw IoError("bad polar scan magic");
  Reader in(bytes);
  for (int i = 0; i < 4; ++i) in.u8();
  PolarScan scan;
  const uint32_t n_az = in.u32();
  const uint32_t n_bins = in.u32();
  scan.range_resolution = in.f64();
  scan.scan_period = in.f64();
  scan.stamp = in.f64();
  const uint8_t has_stamps = in.u8();
  if (has_stamps > 1) throw IoError("bad azimuth stamp flag");
  if (n_az == 0 || n_bins == 0 || n_az > (1u << 16) || n_bins > (1u << 20))
    throw IoError("implausible polar scan dimensions");
  if (has_stamps) {
    scan.azimuth_stamps.resize(n_az);
    for (auto &s : scan.azimuth_stamps) s = in.f64();
  }
  if (in.remaining() != static_cast<size_t>(n_az) * n_bins)
    throw IoError("polar scan payload size mismatch");
  scan.power.resize(n_az, n_bins);
  for (uint32_t a = 0; a < n_az; ++a)
    for (uint32_t r = 0; r < n_bins; ++r) scan.power(a, r) = in.u8();
  try {
    scan.validate();
  } catch (const InputError &e) {
    throw IoError(e.what());
  }
  return scan;
}

void write_polar_scan(const std::filesystem::path &path, const PolarScan &scan) {
  const auto bytes = encode_polar_scan(scan);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

PolarScan read_polar_scan(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scan " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  try {
    return decode_polar_scan(bytes);
  } catch (const IoError &e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::vector<std::string> read_manifest(const std::filesystem::path &sequence_dir) {
  const auto path = sequence_dir / kManifestName;
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    names.push_back(line.substr(first, last - first + 1));
  }
  return names;
}

void write_manifest(const std::filesystem::path &sequence_dir,
                    const std::vector<std::string> &names) {
  std::ofstream out(sequence_dir / kManifestName);
  if (!out) throw IoError("cannot write manifest in " + sequence_dir.string());
  for (const auto &n : names) out << n << '\n';
}

void write_trajectory(const std::filesystem::path &path, const Trajectory &trajectory) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << std::setprecision(17);
  for (const auto &p : trajectory)
    out << p.stamp << ' ' << p.pose.x() << ' ' << p.pose.y() << ' ' << p.pose.angle() << '\n';
}

Trajectory read_trajectory(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trajectory " + path.string());
  Trajectory traj;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    std::istringstream ss(line);
    double stamp, x, y, yaw;
    if (!(ss >> stamp >> x >> y >> yaw))
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected 'stamp x y yaw'");
    traj.push_back({stamp, Pose2(x, y, yaw)});
  }
  return traj;
}

void write_points(const std::filesystem::path &path, const std::vector<Eigen::Vector2d> &points) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << std::setprecision(10);
  for (const auto &p : points) out << p.x() << ' ' << p.y() << '\n';
}

}  // namespace radar_slam
