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
#include <span>
#include <vector>

namespace lpvc {

/// MSB-first bit writer.
class BitWriter {
 public:
  void put_bit(bool bit);
  /// Writes the low `count` bits of `value`, most significant first.
  void put_bits(std::uint64_t value, int count);

  /// Unsigned exp-Golomb: floor(log2(v+1)) zeros, then v+1 in binary.
  void put_ue(std::uint32_t value);
  /// Signed exp-Golomb: k>0 -> 2k-1, k<=0 -> -2k, then ue.
  void put_se(std::int32_t value);

  std::uint64_t bit_count() const { return bits_; }
  /// Bytes written so far; the final byte is zero-padded.
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
  std::uint64_t bits_ = 0;
};

/// MSB-first bit reader over a byte span. Reading past `bit_limit` throws
/// DataError.
class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> data);
  BitReader(std::span<const std::uint8_t> data, std::uint64_t bit_limit);

  bool get_bit();
  std::uint64_t get_bits(int count);
  std::uint32_t get_ue();
  std::int32_t get_se();

  std::uint64_t position() const { return pos_; }
  std::uint64_t remaining() const { return limit_ - pos_; }

 private:
  std::span<const std::uint8_t> data_;
  std::uint64_t limit_;
  std::uint64_t pos_ = 0;
};

/// Length in bits of ue(value) / se(value).
int ue_length(std::uint32_t value);
int se_length(std::int32_t value);

}  // namespace lpvc
