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

#include <filesystem>
#include <optional>

#include "lpvc/networks.hpp"

namespace lpvc {

// Weight file layout (all little-endian):
//   "LFPW" | version u8 | kind u8 (0 generator, 1 discriminator)
//   five i32 config fields
//     generator:     K, B, C, kernel, res_scale in millionths
//     discriminator: in_channels, depth1, depth2, kernel, input_size
//   every parameter tensor in declaration order as IEEE-754 binary32.
inline constexpr std::uint8_t kWeightFileVersion = 1;

enum class NetworkKind : std::uint8_t { kGenerator = 0, kDiscriminator = 1 };

void save_generator(const Generator& net, const std::filesystem::path& path);
void save_discriminator(const Discriminator& net, const std::filesystem::path& path);

/// Throws ConfigMismatch when `expected_k` is given and the file was
/// trained for a different number of input frames.
Generator load_generator(const std::filesystem::path& path, std::optional<int> expected_k = std::nullopt);
Discriminator load_discriminator(const std::filesystem::path& path);

/// Rounds every parameter to binary32, i.e. what a save/load cycle yields.
Weights to_storage_precision(Weights weights);

}  // namespace lpvc
