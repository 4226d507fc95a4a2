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
#include <optional>
#include <span>
#include <vector>

#include "lpvc/frame.hpp"
#include "lpvc/networks.hpp"
#include "lpvc/predictors.hpp"
#include "lpvc/residual_codec.hpp"

namespace lpvc {

struct CodecConfig {
  PredictorKind predictor = PredictorKind::kFd;
  int k = 1;  // intra-coded lead-in frames; must equal the generator's K for lfp
  int qp = 30;
  MotionSearchConfig motion;

  void validate() const;
};

inline constexpr std::uint32_t kBitstreamVersion = 1;

/// Container header: "LPVC" then nine little-endian u32 fields.
struct BitstreamHeader {
  std::uint32_t version = kBitstreamVersion;
  int width = 0;
  int height = 0;
  int frame_count = 0;
  FrameRate frame_rate;
  PredictorKind predictor = PredictorKind::kFd;
  int k = 1;
  int qp = 30;

  static constexpr std::size_t kSize = 4 + 9 * 4;

  std::vector<std::uint8_t> serialize() const;
  /// Throws DataError on bad magic, unknown version or invalid fields.
  static BitstreamHeader parse(std::span<const std::uint8_t> bytes);

  friend bool operator==(const BitstreamHeader&, const BitstreamHeader&) = default;
};

struct FrameStats {
  int index = 0;
  bool intra = false;
  std::uint64_t mv_bits = 0;
  std::uint64_t residual_bits = 0;  // the intra plane for intra frames
  std::optional<double> prediction_psnr;
  double reconstruction_psnr = 0.0;

  std::uint64_t bits() const { return mv_bits + residual_bits; }
};

struct EncodeResult {
  std::vector<std::uint8_t> bitstream;
  std::vector<FrameStats> frames;
  VideoSeq reconstruction;

  /// Sum of coded bits over all frames, excluding container framing.
  std::uint64_t payload_bits() const;
  double kbps() const;
  double mean_psnr() const;
};

/// Closed-loop encoder. The first K frames are intra coded; every later
/// frame is predicted from reconstructed frames and its residual coded.
/// `net` is required for lfp.
EncodeResult encode_video(const VideoSeq& seq, const CodecConfig& config, const Generator* net = nullptr);

/// Output is bit-identical to EncodeResult::reconstruction.
VideoSeq decode_video(std::span<const std::uint8_t> bitstream, const Generator* net = nullptr);

struct PredictOptions {
  int crop = 0;  // border excluded from the PSNR
  MotionSearchConfig motion;
};

struct PredictionScore {
  int index = 0;
  double psnr = 0.0;
};

/// Open-loop prediction quality: each frame at index >= context size is
/// predicted from the original (uncompressed) frames preceding it.
std::vector<PredictionScore> predict_only(const VideoSeq& seq, PredictorKind predictor,
                                          const PredictOptions& options = {}, const Generator* net = nullptr);

/// Left-neighbour differential motion vector coding (se(dx - left.dx),
/// se(dy - left.dy)); the predictor resets to (0,0) on every block row.
void write_motion_field(BitWriter& out, const MotionField& field);
MotionField read_motion_field(BitReader& in, int width, int height, int max_abs_component);

}  // namespace lpvc
