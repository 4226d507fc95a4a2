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

#include "lpvc/bitstream.hpp"

#include <bit>

#include "lpvc/error.hpp"

namespace lpvc {

namespace {

std::uint32_t se_to_ue(std::int32_t k) {
  return k > 0 ? 2u * static_cast<std::uint32_t>(k) - 1u : 2u * static_cast<std::uint32_t>(-static_cast<std::int64_t>(k));
}

}  // namespace

void BitWriter::put_bit(bool bit) {
  if (bits_ % 8 == 0) bytes_.push_back(0);
  if (bit) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (bits_ % 8));
  ++bits_;
}

void BitWriter::put_bits(std::uint64_t value, int count) {
  for (int i = count - 1; i >= 0; --i) put_bit((value >> i) & 1u);
}

void BitWriter::put_ue(std::uint32_t value) {
  const std::uint64_t v = std::uint64_t(value) + 1;
  const int width = std::bit_width(v);
  put_bits(0, width - 1);
  put_bits(v, width);
}

void BitWriter::put_se(std::int32_t value) { put_ue(se_to_ue(value)); }

BitReader::BitReader(std::span<const std::uint8_t> data) : BitReader(data, std::uint64_t(data.size()) * 8) {}

BitReader::BitReader(std::span<const std::uint8_t> data, std::uint64_t bit_limit)
    : data_(data), limit_(bit_limit) {
  if (bit_limit > std::uint64_t(data.size()) * 8) throw InvalidArgument("bit limit beyond buffer");
}

bool BitReader::get_bit() {
  if (pos_ >= limit_) throw DataError("bitstream exhausted");
  const bool bit = (data_[pos_ / 8] >> (7 - pos_ % 8)) & 1u;
  ++pos_;
  return bit;
}

std::uint64_t BitReader::get_bits(int count) {
  std::uint64_t v = 0;
  for (int i = 0; i < count; ++i) v = (v << 1) | std::uint64_t(get_bit());
  return v;
}

std::uint32_t BitReader::get_ue() {
  int zeros = 0;
  while (!get_bit()) {
    if (++zeros > 32) throw DataError("exp-Golomb prefix too long");
  }
  const std::uint64_t v = (std::uint64_t(1) << zeros) | get_bits(zeros);
  if (v - 1 > 0xFFFFFFFFull) throw DataError("exp-Golomb value out of range");
  return static_cast<std::uint32_t>(v - 1);
}

std::int32_t BitReader::get_se() {
  const std::uint32_t u = get_ue();
  const std::int64_t k = (u & 1u) ? (std::int64_t(u) + 1) / 2 : -(std::int64_t(u) / 2);
  return static_cast<std::int32_t>(k);
}

int ue_length(std::uint32_t value) { return 2 * std::bit_width(std::uint64_t(value) + 1) - 1; }

int se_length(std::int32_t value) { return ue_length(se_to_ue(value)); }

}  // namespace lpvc
