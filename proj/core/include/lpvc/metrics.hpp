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

#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <vector>

#include "lpvc/frame.hpp"

namespace lpvc {

/// PSNR reported for identical frames, keeps sequence means finite.
inline constexpr double kPsnrCap = 99.0;

double mse(const Frame& a, const Frame& b);

/// 10*log10(255^2 / MSE), or kPsnrCap when the frames are identical.
double psnr(const Frame& a, const Frame& b);

/// PSNR restricted to the window [border, w-border) x [border, h-border).
double psnr_cropped(const Frame& a, const Frame& b, int border);

struct SequencePsnr {
  std::vector<double> per_frame;
  double mean = 0.0;  // over frames with index >= skip
};

/// Per-frame PSNR of `decoded` against `original`; the first `skip` frames
/// are listed but excluded from the mean.
SequencePsnr sequence_psnr(const VideoSeq& decoded, const VideoSeq& original, std::size_t skip = 0);

struct RdPoint {
  double bitrate_kbps = 0.0;
  double psnr_db = 0.0;
};

/// At least four points with strictly increasing, positive bitrate.
class RdCurve {
 public:
  /// Sorts by bitrate and validates. Throws InvalidArgument on fewer than
  /// four points, non-positive or duplicate bitrates.
  explicit RdCurve(std::vector<RdPoint> points);

  std::span<const RdPoint> points() const { return points_; }
  double min_log_rate() const;
  double max_log_rate() const;

 private:
  std::vector<RdPoint> points_;
};

/// Coefficients c0..c3 of psnr = c0 + c1*t + c2*t^2 + c3*t^3, t = log10(kbps),
/// least-squares over every point of the curve.
std::array<double, 4> fit_log_cubic(const RdCurve& curve);

/// Bjontegaard delta PSNR: mean vertical gap (test - anchor) between the
/// fitted curves over their common log-rate interval. Positive means the
/// test codec is better.
double bd_psnr(const RdCurve& test, const RdCurve& anchor);

/// CSV with header `bitrate_kbps,psnr_db`.
std::vector<RdPoint> read_rd_csv(const std::filesystem::path& path);
void write_rd_csv(std::span<const RdPoint> points, const std::filesystem::path& path);

}  // namespace lpvc
