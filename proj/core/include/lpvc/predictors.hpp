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
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "lpvc/frame.hpp"
#include "lpvc/networks.hpp"

namespace lpvc {

inline constexpr int kMotionBlockSize = 16;

/// Motion vector in half-pel units: predicted(x,y) = ref(x + dx/2, y + dy/2).
struct MotionVector {
  int dx = 0;
  int dy = 0;
  friend bool operator==(const MotionVector&, const MotionVector&) = default;
};

/// One vector per 16x16 block, raster order.
struct MotionField {
  int blocks_x = 0;
  int blocks_y = 0;
  std::vector<MotionVector> mvs;

  static MotionField zeros(int width, int height);
  MotionVector& at(int bx, int by) { return mvs[static_cast<std::size_t>(by) * blocks_x + bx]; }
  const MotionVector& at(int bx, int by) const { return mvs[static_cast<std::size_t>(by) * blocks_x + bx]; }
  friend bool operator==(const MotionField&, const MotionField&) = default;
};

struct Prediction {
  Frame frame;
  std::optional<MotionField> side_info;  // present only for BMC
};

enum class PredictorKind : std::uint8_t { kFd = 0, kBmc = 1, kLfp = 2 };

const char* to_string(PredictorKind kind);
/// Parses "fd", "bmc", "lfp"; throws InvalidArgument otherwise.
PredictorKind parse_predictor(std::string_view name);

/// Previous frame copied verbatim.
Prediction fd_predict(const Frame& past);

/// Bilinear sample at half-pel coordinates (hx/2, hy/2). Neighbour indices
/// are clamped into the frame; averages round half away from zero.
std::uint8_t half_pel_sample(const Frame& ref, int hx, int hy);

enum class MatchCost { kSad, kSse };

struct MotionSearchConfig {
  int search_range = 16;  // pixels; candidates span [-2R, 2R] half-pels
  MatchCost cost = MatchCost::kSad;
};

struct MotionSearchResult {
  MotionField field;
  std::vector<std::uint64_t> costs;  // best cost per block
};

/// Exhaustive half-pel block matching. Partial edge blocks are evaluated
/// over the full 16x16 window with edge replication. Ties go to the smaller
/// |dx|+|dy|, then to the earlier candidate in raster order (dy outer).
MotionSearchResult bmc_search(const Frame& current, const Frame& ref, const MotionSearchConfig& config = {});

/// Builds the prediction block by block from `ref`.
Frame bmc_compensate(const Frame& ref, const MotionField& field);

/// Runs the generator on the K most recent frames (oldest first).
Prediction lfp_predict(std::span<const Frame> past, const Generator& net);

/// v/127.5 - 1 per sample, frames stacked as channels.
Tensor frames_to_tensor(std::span<const Frame> frames);
/// clamp(round((y+1)*127.5), 0, 255) with rounding half away from zero.
Frame tensor_to_frame(const Tensor& t);

/// Common predictor contract used by the codec. The encoder calls
/// predict(); the decoder rebuilds the same frame with reconstruct().
class FramePredictor {
 public:
  virtual ~FramePredictor() = default;

  virtual PredictorKind kind() const = 0;
  /// Number of past frames consumed per prediction.
  virtual int context_size() const = 0;

  /// `past` holds exactly context_size() frames, oldest first. `current` is
  /// the frame being coded; only predictors with side information look at it.
  virtual Prediction predict(std::span<const Frame> past, const Frame& current) const = 0;
  virtual Frame reconstruct(std::span<const Frame> past, const MotionField* side_info) const = 0;
};

std::unique_ptr<FramePredictor> make_fd_predictor();
std::unique_ptr<FramePredictor> make_bmc_predictor(MotionSearchConfig config);
/// The generator must outlive the predictor.
std::unique_ptr<FramePredictor> make_lfp_predictor(const Generator& net);

}  // namespace lpvc
