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

#include "lpvc/residual_codec.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lpvc/error.hpp"

namespace lpvc {

QuantParams QuantParams::from_qp(int qp) {
  if (qp < kMinQp || qp > kMaxQp) throw InvalidArgument("qp must be in [0, 51], got " + std::to_string(qp));
  return {qp, std::max(0.5, std::pow(2.0, (qp - 4) / 6.0))};
}

namespace {

using Basis = std::array<std::array<double, 8>, 8>;

const Basis& dct_basis() {
  static const Basis basis = [] {
    Basis b{};
    for (int k = 0; k < 8; ++k) {
      const double alpha = k == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      for (int n = 0; n < 8; ++n) b[k][n] = alpha * std::cos(std::numbers::pi * (2 * n + 1) * k / 16.0);
    }
    return b;
  }();
  return basis;
}

int round_half_away(double v) { return static_cast<int>(std::round(v)); }

}  // namespace

Block8 dct8_forward(const Block8& block) {
  const auto& c = dct_basis();
  Block8 tmp{};
  Block8 out{};
  // rows: tmp[y][k] = sum_x c[k][x] * block[y][x]
  for (int y = 0; y < 8; ++y)
    for (int k = 0; k < 8; ++k) {
      double s = 0.0;
      for (int x = 0; x < 8; ++x) s += c[k][x] * block[y * 8 + x];
      tmp[y * 8 + k] = s;
    }
  for (int k = 0; k < 8; ++k)
    for (int u = 0; u < 8; ++u) {
      double s = 0.0;
      for (int y = 0; y < 8; ++y) s += c[k][y] * tmp[y * 8 + u];
      out[k * 8 + u] = s;
    }
  return out;
}

Block8 dct8_inverse(const Block8& coefs) {
  const auto& c = dct_basis();
  Block8 tmp{};
  Block8 out{};
  for (int k = 0; k < 8; ++k)
    for (int x = 0; x < 8; ++x) {
      double s = 0.0;
      for (int u = 0; u < 8; ++u) s += c[u][x] * coefs[k * 8 + u];
      tmp[k * 8 + x] = s;
    }
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      double s = 0.0;
      for (int k = 0; k < 8; ++k) s += c[k][y] * tmp[k * 8 + x];
      out[y * 8 + x] = s;
    }
  return out;
}

int quantize_level(double coef, double step) { return round_half_away(coef / step); }

LevelBlock quantize(const Block8& coefs, const QuantParams& q) {
  LevelBlock levels{};
  for (std::size_t i = 0; i < 64; ++i) levels[i] = quantize_level(coefs[i], q.step);
  return levels;
}

Block8 dequantize(const LevelBlock& levels, const QuantParams& q) {
  Block8 coefs{};
  for (std::size_t i = 0; i < 64; ++i) coefs[i] = levels[i] * q.step;
  return coefs;
}

const std::array<int, 64>& zigzag_order() {
  static const std::array<int, 64> order = [] {
    std::array<int, 64> o{};
    int i = 0;
    for (int d = 0; d < 15; ++d) {
      // Even diagonals run bottom-left to top-right, odd ones the other way.
      for (int j = 0; j <= d; ++j) {
        const int row = (d % 2 == 0) ? d - j : j;
        const int col = d - row;
        if (row < 8 && col < 8) o[static_cast<std::size_t>(i++)] = row * 8 + col;
      }
    }
    return o;
  }();
  return order;
}

LevelBlock zigzag_scan(const LevelBlock& raster) {
  LevelBlock out{};
  const auto& order = zigzag_order();
  for (std::size_t i = 0; i < 64; ++i) out[i] = raster[static_cast<std::size_t>(order[i])];
  return out;
}

LevelBlock zigzag_unscan(const LevelBlock& scanned) {
  LevelBlock out{};
  const auto& order = zigzag_order();
  for (std::size_t i = 0; i < 64; ++i) out[static_cast<std::size_t>(order[i])] = scanned[i];
  return out;
}

void write_block_levels(BitWriter& out, const LevelBlock& scanned) {
  int last = -1;
  for (int i = 63; i >= 0; --i)
    if (scanned[static_cast<std::size_t>(i)] != 0) {
      last = i;
      break;
    }
  int pos = 0;
  for (int i = 0; i <= last; ++i) {
    const int level = scanned[static_cast<std::size_t>(i)];
    if (level == 0) continue;
    int run = i - pos;
    if (run == static_cast<int>(kEobRun)) {
      // A real run of 63 would collide with EOB: spell out coefficient 62
      // as an explicit zero level instead.
      out.put_ue(62);
      out.put_se(0);
      run = 0;
    }
    out.put_ue(static_cast<std::uint32_t>(run));
    out.put_se(level);
    pos = i + 1;
  }
  if (pos < 64) out.put_ue(kEobRun);
}

LevelBlock read_block_levels(BitReader& in) {
  LevelBlock scanned{};
  std::uint32_t pos = 0;
  while (pos < 64) {
    const std::uint32_t run = in.get_ue();
    if (run == kEobRun) break;
    if (pos + run > 63) throw DataError("run-level run " + std::to_string(run) + " overflows the block");
    pos += run;
    scanned[pos] = in.get_se();
    ++pos;
  }
  return scanned;
}

Plane::Plane(int w, int h, int fill) : width(w), height(h) {
  if (w <= 0 || h <= 0) throw InvalidArgument("plane dimensions must be positive");
  values.assign(static_cast<std::size_t>(w) * h, fill);
}

Plane intra_plane(const Frame& frame) {
  Plane p(frame.width(), frame.height());
  const auto s = frame.samples();
  for (std::size_t i = 0; i < s.size(); ++i) p.values[i] = int(s[i]) - 128;
  return p;
}

Frame frame_from_intra(const Plane& plane) {
  Frame f(plane.width, plane.height);
  auto s = f.samples();
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<std::uint8_t>(std::clamp(plane.values[i] + 128, 0, 255));
  return f;
}

namespace {

int blocks_along(int n) { return (n + 7) / 8; }

std::pair<int, int> value_range(PlaneKind kind) {
  return kind == PlaneKind::kIntra ? std::pair{-128, 127} : std::pair{-255, 255};
}

// Shared by encoder and decoder so both produce identical reconstructions.
void reconstruct_block(const LevelBlock& scanned, const QuantParams& q, PlaneKind kind, int bx, int by, Plane& out) {
  const Block8 pixels = dct8_inverse(dequantize(zigzag_unscan(scanned), q));
  const auto [lo, hi] = value_range(kind);
  for (int y = 0; y < 8; ++y) {
    const int py = by * 8 + y;
    if (py >= out.height) break;
    for (int x = 0; x < 8; ++x) {
      const int px = bx * 8 + x;
      if (px >= out.width) break;
      out.at(px, py) = std::clamp(round_half_away(pixels[static_cast<std::size_t>(y * 8 + x)]), lo, hi);
    }
  }
}

void check_plane(const Plane& plane, PlaneKind kind) {
  if (plane.width <= 0 || plane.height <= 0 ||
      plane.values.size() != static_cast<std::size_t>(plane.width) * plane.height)
    throw InvalidArgument("malformed plane");
  const auto [lo, hi] = value_range(kind);
  for (int v : plane.values)
    if (v < lo || v > hi) throw InvalidArgument("plane value " + std::to_string(v) + " out of range");
}

}  // namespace

Plane encode_plane_into(BitWriter& out, const Plane& plane, PlaneKind kind, const QuantParams& q) {
  check_plane(plane, kind);
  Plane recon(plane.width, plane.height);
  for (int by = 0; by < blocks_along(plane.height); ++by)
    for (int bx = 0; bx < blocks_along(plane.width); ++bx) {
      Block8 block{};
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
          const int px = std::min(bx * 8 + x, plane.width - 1);
          const int py = std::min(by * 8 + y, plane.height - 1);
          block[static_cast<std::size_t>(y * 8 + x)] = plane.at(px, py);
        }
      const LevelBlock scanned = zigzag_scan(quantize(dct8_forward(block), q));
      write_block_levels(out, scanned);
      reconstruct_block(scanned, q, kind, bx, by, recon);
    }
  return recon;
}

Plane decode_plane_from(BitReader& in, int width, int height, PlaneKind kind, const QuantParams& q) {
  Plane recon(width, height);
  for (int by = 0; by < blocks_along(height); ++by)
    for (int bx = 0; bx < blocks_along(width); ++bx) reconstruct_block(read_block_levels(in), q, kind, bx, by, recon);
  return recon;
}

EncodedPlane encode_plane(const Plane& plane, PlaneKind kind, const QuantParams& q) {
  BitWriter out;
  EncodedPlane result;
  result.reconstruction = encode_plane_into(out, plane, kind, q);
  result.coded.kind = kind;
  result.coded.quant = q;
  result.coded.width = plane.width;
  result.coded.height = plane.height;
  result.coded.bits = out.bit_count();
  result.coded.payload = out.take();
  return result;
}

Plane decode_plane(const CodedPlane& coded) {
  if (coded.bits > std::uint64_t(coded.payload.size()) * 8) throw DataError("coded plane bit count exceeds payload");
  BitReader in(coded.payload, coded.bits);
  return decode_plane_from(in, coded.width, coded.height, coded.kind, coded.quant);
}

}  // namespace lpvc
