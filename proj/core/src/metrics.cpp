// Copyright 2026 The LPVC Authors
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

#include "lpvc/metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "lpvc/error.hpp"

namespace lpvc {

namespace {

double psnr_from_sse(double sse, std::size_t count) {
  if (sse == 0.0) return kPsnrCap;
  const double m = sse / static_cast<double>(count);
  return 10.0 * std::log10(255.0 * 255.0 / m);
}

void require_same_dims(const Frame& a, const Frame& b) {
  if (!a.same_dims(b) || a.empty()) throw InvalidArgument("frame dimensions differ");
}

}  // namespace

double mse(const Frame& a, const Frame& b) {
  require_same_dims(a, b);
  std::uint64_t sse = 0;
  const auto sa = a.samples();
  const auto sb = b.samples();
  for (std::size_t i = 0; i < sa.size(); ++i) {
    const int d = int(sa[i]) - int(sb[i]);
    sse += static_cast<std::uint64_t>(d * d);
  }
  return static_cast<double>(sse) / static_cast<double>(sa.size());
}

double psnr(const Frame& a, const Frame& b) {
  require_same_dims(a, b);
  return psnr_cropped(a, b, 0);
}

double psnr_cropped(const Frame& a, const Frame& b, int border) {
  require_same_dims(a, b);
  if (border < 0 || 2 * border >= a.width() || 2 * border >= a.height())
    throw InvalidArgument("crop border leaves no pixels");
  std::uint64_t sse = 0;
  for (int y = border; y < a.height() - border; ++y)
    for (int x = border; x < a.width() - border; ++x) {
      const int d = int(a.at(x, y)) - int(b.at(x, y));
      sse += static_cast<std::uint64_t>(d * d);
    }
  const auto count = static_cast<std::size_t>(a.width() - 2 * border) * (a.height() - 2 * border);
  return psnr_from_sse(static_cast<double>(sse), count);
}

SequencePsnr sequence_psnr(const VideoSeq& decoded, const VideoSeq& original, std::size_t skip) {
  if (decoded.size() != original.size()) throw InvalidArgument("sequence lengths differ");
  if (skip >= decoded.size()) throw InvalidArgument("skip excludes every frame");
  SequencePsnr out;
  double sum = 0.0;
  for (std::size_t i = 0; i < decoded.size(); ++i) {
    out.per_frame.push_back(psnr(decoded.frames[i], original.frames[i]));
    if (i >= skip) sum += out.per_frame.back();
  }
  out.mean = sum / static_cast<double>(decoded.size() - skip);
  return out;
}

RdCurve::RdCurve(std::vector<RdPoint> points) : points_(std::move(points)) {
  if (points_.size() < 4) throw InvalidArgument("an RD curve needs at least 4 points");
  std::sort(points_.begin(), points_.end(),
            [](const RdPoint& a, const RdPoint& b) { return a.bitrate_kbps < b.bitrate_kbps; });
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!(points_[i].bitrate_kbps > 0.0) || !std::isfinite(points_[i].bitrate_kbps))
      throw InvalidArgument("RD bitrates must be positive");
    if (!std::isfinite(points_[i].psnr_db)) throw InvalidArgument("RD PSNR must be finite");
    if (i > 0 && points_[i].bitrate_kbps <= points_[i - 1].bitrate_kbps)
      throw InvalidArgument("RD bitrates must be distinct");
  }
}

double RdCurve::min_log_rate() const { return std::log10(points_.front().bitrate_kbps); }
double RdCurve::max_log_rate() const { return std::log10(points_.back().bitrate_kbps); }

std::array<double, 4> fit_log_cubic(const RdCurve& curve) {
  const auto pts = curve.points();
  Eigen::MatrixXd design(static_cast<Eigen::Index>(pts.size()), 4);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double t = std::log10(pts[i].bitrate_kbps);
    const auto row = static_cast<Eigen::Index>(i);
    design(row, 0) = 1.0;
    design(row, 1) = t;
    design(row, 2) = t * t;
    design(row, 3) = t * t * t;
    rhs(row) = pts[i].psnr_db;
  }
  const Eigen::VectorXd c = design.colPivHouseholderQr().solve(rhs);
  return {c(0), c(1), c(2), c(3)};
}

double bd_psnr(const RdCurve& test, const RdCurve& anchor) {
  const double lo = std::max(test.min_log_rate(), anchor.min_log_rate());
  const double hi = std::min(test.max_log_rate(), anchor.max_log_rate());
  if (!(hi > lo)) throw InvalidArgument("RD curves do not overlap in bitrate");

  const auto ct = fit_log_cubic(test);
  const auto ca = fit_log_cubic(anchor);
  std::array<double, 4> diff{};
  for (std::size_t i = 0; i < 4; ++i) diff[i] = ct[i] - ca[i];

  // Antiderivative of the difference polynomial evaluated at the bounds.
  auto primitive = [&diff](double t) {
    return t * (diff[0] + t * (diff[1] / 2.0 + t * (diff[2] / 3.0 + t * diff[3] / 4.0)));
  };
  return (primitive(hi) - primitive(lo)) / (hi - lo);
}

std::vector<RdPoint> read_rd_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty RD csv: " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "bitrate_kbps,psnr_db") throw DataError("RD csv header must be bitrate_kbps,psnr_db");
  std::vector<RdPoint> points;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw DataError("RD csv line " + std::to_string(lineno) + " lacks a comma");
    try {
      std::size_t used = 0;
      RdPoint p;
      p.bitrate_kbps = std::stod(line.substr(0, comma), &used);
      p.psnr_db = std::stod(line.substr(comma + 1));
      points.push_back(p);
    } catch (const std::logic_error&) {
      throw DataError("RD csv line " + std::to_string(lineno) + " is not numeric");
    }
  }
  return points;
}

void write_rd_csv(std::span<const RdPoint> points, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "bitrate_kbps,psnr_db\n" << std::setprecision(17);
  for (const auto& p : points) out << p.bitrate_kbps << ',' << p.psnr_db << '\n';
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace lpvc
