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
#include <cstdint>
#include <span>
#include <vector>

#include "lpvc/bitstream.hpp"
#include "lpvc/frame.hpp"

namespace lpvc {

inline constexpr int kMinQp = 0;
inline constexpr int kMaxQp = 51;

/// Uniform quantizer. step = max(0.5, 2^((qp-4)/6)).
struct QuantParams {
  int qp = 30;
  double step = 1.0;

  static QuantParams from_qp(int qp);
};

using Block8 = std::array<double, 64>;      // raster order, row-major
using LevelBlock = std::array<int, 64>;

/// Orthonormal 8x8 DCT-II (forward) and DCT-III (inverse), separable.
Block8 dct8_forward(const Block8& block);
Block8 dct8_inverse(const Block8& coefs);

/// round(c/step), half away from zero.
int quantize_level(double coef, double step);
LevelBlock quantize(const Block8& coefs, const QuantParams& q);
Block8 dequantize(const LevelBlock& levels, const QuantParams& q);

/// JPEG zigzag: zigzag_order()[i] is the raster index of scan position i.
const std::array<int, 64>& zigzag_order();
LevelBlock zigzag_scan(const LevelBlock& raster);
LevelBlock zigzag_unscan(const LevelBlock& scanned);

/// Run value reserved as end-of-block marker.
inline constexpr std::uint32_t kEobRun = 63;

/// Appends one block's scanned levels as (ue(run), se(level))* + EOB.
void write_block_levels(BitWriter& out, const LevelBlock& scanned);
LevelBlock read_block_levels(BitReader& in);

/// Intra planes hold samples shifted by -128; residual planes hold
/// current - prediction in [-255, 255].
enum class PlaneKind : std::uint8_t { kIntra = 0, kResidual = 1 };

/// Signed integer plane, row-major.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<int> values;

  Plane() = default;
  Plane(int w, int h, int fill = 0);
  int at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  int& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
  friend bool operator==(const Plane&, const Plane&) = default;
};

Plane intra_plane(const Frame& frame);
Frame frame_from_intra(const Plane& plane);

struct CodedPlane {
  PlaneKind kind = PlaneKind::kResidual;
  QuantParams quant;
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> payload;
  std::uint64_t bits = 0;
};

struct EncodedPlane {
  CodedPlane coded;
  Plane reconstruction;  // identical to decode_plane(coded)
};

/// 8x8 blocks in raster order over the plane padded to multiples of 8 by
/// edge replication: dct8 -> quantize -> zigzag -> run-level coding.
EncodedPlane encode_plane(const Plane& plane, PlaneKind kind, const QuantParams& q);
Plane decode_plane(const CodedPlane& coded);

/// Streaming variants used when several sections share one bit string.
Plane encode_plane_into(BitWriter& out, const Plane& plane, PlaneKind kind, const QuantParams& q);
Plane decode_plane_from(BitReader& in, int width, int height, PlaneKind kind, const QuantParams& q);

}  // namespace lpvc
