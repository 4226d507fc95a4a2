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

#include "lpvc/dataset.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <random>

#include "lpvc/error.hpp"

namespace lpvc {

void ExtractConfig::validate(std::size_t video_count) const {
  if (patch_size < 1 || seq_len < 2) throw InvalidArgument("patch geometry must be at least 1x1 over 2 frames");
  if (!(low_motion_accept_prob >= 0.0 && low_motion_accept_prob <= 1.0))
    throw InvalidArgument("acceptance probability must be in [0,1]");
  if (!(motion_threshold >= 0.0)) throw InvalidArgument("motion threshold must be >= 0");
  if (!video_weights.empty()) {
    if (video_weights.size() != video_count) throw InvalidArgument("one sampling weight per video is required");
    double total = 0.0;
    for (double w : video_weights) {
      if (!(w >= 0.0)) throw InvalidArgument("sampling weights must be non-negative");
      total += w;
    }
    if (!(total > 0.0)) throw InvalidArgument("sampling weights sum to zero");
  }
}

bool has_sufficient_motion(const PatchSeq& seq, double threshold) {
  for (int t = 1; t < seq.frames; ++t) {
    const auto a = seq.frame(t - 1);
    const auto b = seq.frame(t);
    std::uint64_t sse = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const int d = int(a[i]) - int(b[i]);
      sse += static_cast<std::uint64_t>(d * d);
    }
    if (!(static_cast<double>(sse) / static_cast<double>(a.size()) > threshold)) return false;
  }
  return true;
}

namespace {

// Rejection sampler shared by both entry points. Stops once `count`
// sequences are accepted or `max_trials` candidates were drawn.
ExtractResult run_sampler(std::span<const VideoSeq> videos, const ExtractConfig& config, std::size_t count,
                          std::uint64_t max_trials) {
  if (videos.empty()) throw InvalidArgument("no source videos");
  config.validate(videos.size());
  for (const auto& v : videos) {
    v.validate();
    if (v.width() < config.patch_size || v.height() < config.patch_size)
      throw InvalidArgument("video smaller than the patch size");
    if (static_cast<int>(v.size()) < config.seq_len) throw InvalidArgument("video shorter than the patch sequence");
  }

  std::mt19937_64 rng(config.seed);
  std::vector<double> weights = config.video_weights;
  if (weights.empty()) weights.assign(videos.size(), 1.0);
  std::discrete_distribution<std::size_t> pick_video(weights.begin(), weights.end());
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  ExtractResult result;
  const int s = config.patch_size;
  while (result.patches.size() < count && result.stats.trials < max_trials) {
    ++result.stats.trials;
    const std::size_t vi = pick_video(rng);
    const VideoSeq& video = videos[vi];
    const int start = std::uniform_int_distribution<int>(0, static_cast<int>(video.size()) - config.seq_len)(rng);
    const int x0 = std::uniform_int_distribution<int>(0, video.width() - s)(rng);
    const int y0 = std::uniform_int_distribution<int>(0, video.height() - s)(rng);

    PatchSeq seq;
    seq.frames = config.seq_len;
    seq.size = s;
    seq.source = static_cast<int>(vi);
    seq.samples.reserve(static_cast<std::size_t>(config.seq_len) * s * s);
    for (int t = 0; t < config.seq_len; ++t) {
      const Frame& f = video.frames[static_cast<std::size_t>(start + t)];
      for (int y = 0; y < s; ++y) {
        const auto row = f.samples().subspan(static_cast<std::size_t>(y0 + y) * f.width() + x0, s);
        seq.samples.insert(seq.samples.end(), row.begin(), row.end());
      }
    }
    const bool moving = has_sufficient_motion(seq, config.motion_threshold);
    // The coin is always drawn so the random stream does not depend on content.
    const bool lucky = coin(rng) < config.low_motion_accept_prob;
    if (moving) ++result.stats.high_motion;
    if (moving || lucky) {
      ++result.stats.accepted;
      result.patches.push_back(std::move(seq));
    }
  }
  return result;
}

}  // namespace

ExtractResult extract_patches(std::span<const VideoSeq> videos, const ExtractConfig& config, std::size_t count,
                              std::uint64_t max_trials) {
  if (max_trials == 0) max_trials = 1000 * std::max<std::uint64_t>(count, 1);
  auto result = run_sampler(videos, config, count, max_trials);
  if (result.patches.size() < count)
    throw DataError("patch extraction gave up after " + std::to_string(max_trials) + " trials");
  return result;
}

ExtractResult sample_patches(std::span<const VideoSeq> videos, const ExtractConfig& config, std::uint64_t trials) {
  return run_sampler(videos, config, std::numeric_limits<std::size_t>::max(), trials);
}

namespace {

constexpr std::array<char, 4> kMagic{'L', 'F', 'P', 'D'};
constexpr std::size_t kBlockBytes = std::size_t(PatchSeq::kDefaultFrames) * PatchSeq::kDefaultSize *
                                    PatchSeq::kDefaultSize;

}  // namespace

void write_dataset(std::span<const PatchSeq> patches, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(kMagic.data(), kMagic.size());
  const auto count = static_cast<std::uint32_t>(patches.size());
  for (int i = 0; i < 4; ++i) out.put(static_cast<char>(count >> (8 * i)));
  for (const auto& p : patches) {
    if (p.frames != PatchSeq::kDefaultFrames || p.size != PatchSeq::kDefaultSize || p.samples.size() != kBlockBytes)
      throw InvalidArgument("dataset files hold 9x48x48 patch sequences only");
    out.write(reinterpret_cast<const char*>(p.samples.data()), static_cast<std::streamsize>(kBlockBytes));
  }
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<PatchSeq> read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::vector<char> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic.data(), 4) != 0)
    throw DataError("bad dataset magic: " + path.string());
  std::uint32_t count = 0;
  for (int i = 0; i < 4; ++i) count |= std::uint32_t(static_cast<std::uint8_t>(bytes[4 + std::size_t(i)])) << (8 * i);
  if (bytes.size() != 8 + std::size_t(count) * kBlockBytes)
    throw DataError("dataset size does not match its patch count: " + path.string());
  std::vector<PatchSeq> patches(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto* first = reinterpret_cast<const std::uint8_t*>(bytes.data() + 8 + std::size_t(i) * kBlockBytes);
    patches[i].samples.assign(first, first + kBlockBytes);
  }
  return patches;
}

}  // namespace lpvc
