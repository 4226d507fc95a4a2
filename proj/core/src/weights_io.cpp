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

#include "lpvc/weights_io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "lpvc/error.hpp"

namespace lpvc {

namespace {

constexpr std::array<char, 4> kMagic{'L', 'F', 'P', 'W'};
constexpr std::size_t kHeaderBytes = 4 + 1 + 1 + 5 * 4;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::vector<std::uint8_t>& in, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(in[pos + std::size_t(i)]) << (8 * i);
  return v;
}

void write_file(NetworkKind kind, const std::array<std::int32_t, 5>& fields, const Weights& weights,
                const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes(kMagic.begin(), kMagic.end());
  bytes.push_back(kWeightFileVersion);
  bytes.push_back(static_cast<std::uint8_t>(kind));
  for (auto f : fields) put_u32(bytes, static_cast<std::uint32_t>(f));
  for (const auto& p : weights.params)
    for (double v : p.value.data()) put_u32(bytes, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

struct RawFile {
  NetworkKind kind;
  std::array<std::int32_t, 5> fields;
  std::vector<std::uint8_t> bytes;
};

RawFile read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  RawFile f;
  f.bytes.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  if (f.bytes.size() < kHeaderBytes) throw DataError("weight file truncated: " + path.string());
  if (std::memcmp(f.bytes.data(), kMagic.data(), kMagic.size()) != 0)
    throw DataError("bad weight file magic: " + path.string());
  if (f.bytes[4] != kWeightFileVersion)
    throw DataError("unsupported weight file version " + std::to_string(f.bytes[4]));
  if (f.bytes[5] > 1) throw DataError("unknown network kind in weight file");
  f.kind = static_cast<NetworkKind>(f.bytes[5]);
  for (std::size_t i = 0; i < 5; ++i) f.fields[i] = static_cast<std::int32_t>(get_u32(f.bytes, 6 + 4 * i));
  return f;
}

Weights fill_weights(Weights layout, const RawFile& f) {
  const std::size_t expected = kHeaderBytes + 4 * layout.scalar_count();
  if (f.bytes.size() < expected) throw DataError("weight file truncated");
  if (f.bytes.size() > expected) throw DataError("weight file has trailing bytes; shape mismatch vs header");
  std::size_t pos = kHeaderBytes;
  for (auto& p : layout.params)
    for (auto& v : p.value.data()) {
      v = static_cast<double>(std::bit_cast<float>(get_u32(f.bytes, pos)));
      pos += 4;
    }
  return layout;
}

}  // namespace

void save_generator(const Generator& net, const std::filesystem::path& path) {
  const auto& c = net.config();
  const auto millionths = static_cast<std::int32_t>(std::lround(c.res_scale * 1e6));
  write_file(NetworkKind::kGenerator, {c.k, c.blocks, c.channels, c.kernel, millionths}, net.weights(), path);
}

void save_discriminator(const Discriminator& net, const std::filesystem::path& path) {
  const auto& c = net.config();
  write_file(NetworkKind::kDiscriminator, {c.in_channels, c.depth1, c.depth2, c.kernel, c.input_size}, net.weights(),
             path);
}

Generator load_generator(const std::filesystem::path& path, std::optional<int> expected_k) {
  const auto f = read_file(path);
  if (f.kind != NetworkKind::kGenerator) throw DataError("weight file holds a discriminator, not a generator");
  NetConfig c{f.fields[0], f.fields[1], f.fields[2], f.fields[3], f.fields[4] / 1e6};
  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    throw DataError(std::string("weight file header: ") + e.what());
  }
  if (expected_k && *expected_k != c.k)
    throw ConfigMismatch("weight file was trained with K=" + std::to_string(c.k) + " but this run uses K=" +
                         std::to_string(*expected_k));
  return Generator(c, fill_weights(Generator::make_weights(c, Init::kZeros, 0), f));
}

Discriminator load_discriminator(const std::filesystem::path& path) {
  const auto f = read_file(path);
  if (f.kind != NetworkKind::kDiscriminator) throw DataError("weight file holds a generator, not a discriminator");
  DiscConfig c{f.fields[0], f.fields[1], f.fields[2], f.fields[3], f.fields[4]};
  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    throw DataError(std::string("weight file header: ") + e.what());
  }
  return Discriminator(c, fill_weights(Discriminator::make_weights(c, Init::kZeros, 0), f));
}

Weights to_storage_precision(Weights weights) {
  for (auto& p : weights.params)
    for (auto& v : p.value.data()) v = static_cast<double>(static_cast<float>(v));
  return weights;
}

}  // namespace lpvc
