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

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lpvc/frame.hpp"

namespace lpvc {

/// A short stack of co-located square patches from consecutive frames. The
/// last patch is the prediction target, the others are context.
struct PatchSeq {
  static constexpr int kDefaultFrames = 9;
  static constexpr int kDefaultSize = 48;

  int frames = kDefaultFrames;
  int size = kDefaultSize;
  std::vector<std::uint8_t> samples;  // frame-major, then row-major
  int source = -1;                    // index of the originating video

  std::span<const std::uint8_t> frame(int t) const {
    const auto n = static_cast<std::size_t>(size) * size;
    return std::span<const std::uint8_t>(samples).subspan(static_cast<std::size_t>(t) * n, n);
  }
  friend bool operator==(const PatchSeq&, const PatchSeq&) = default;
};

struct ExtractConfig {
  int patch_size = PatchSeq::kDefaultSize;
  int seq_len = PatchSeq::kDefaultFrames;
  double motion_threshold = 25.0;  // mean-square difference per pixel
  double low_motion_accept_prob = 0.05;
  std::uint64_t seed = 1;
  std::vector<double> video_weights;  // empty: every video equally likely

  void validate(std::size_t video_count) const;
};

struct ExtractStats {
  std::uint64_t trials = 0;
  std::uint64_t accepted = 0;
  std::uint64_t high_motion = 0;  // trials that passed the motion test
};

struct ExtractResult {
  std::vector<PatchSeq> patches;
  ExtractStats stats;
};

/// Mean-square difference between every pair of successive patches
/// exceeds `threshold`.
bool has_sufficient_motion(const PatchSeq& seq, double threshold);

/// Rejection sampling of `count` patch sequences: pick a video by weight,
/// then a start frame and a location uniformly. Candidates with enough
/// motion are kept; the rest are kept with low_motion_accept_prob.
/// Deterministic for a given seed. Gives up with DataError after
/// `max_trials` candidates (0 picks 1000 * count).
ExtractResult extract_patches(std::span<const VideoSeq> videos, const ExtractConfig& config, std::size_t count,
                              std::uint64_t max_trials = 0);

/// Draws exactly `trials` candidates with the same sampler and keeps the
/// accepted ones. Useful for measuring acceptance rates.
ExtractResult sample_patches(std::span<const VideoSeq> videos, const ExtractConfig& config, std::uint64_t trials);

/// Dataset file: "LFPD", u32 LE count, then count raw 9x48x48 byte blocks.
void write_dataset(std::span<const PatchSeq> patches, const std::filesystem::path& path);
std::vector<PatchSeq> read_dataset(const std::filesystem::path& path);

}  // namespace lpvc
