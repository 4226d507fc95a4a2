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

#include "lpvc/frame.hpp"

namespace lpvc {

enum class VideoFormat { kY4m, kRaw };

/// Geometry for headerless raw luma files. frame_count is optional: when
/// absent it is derived from the file size, which must then be an exact
/// multiple of width*height.
struct RawGeometry {
  int width = 0;
  int height = 0;
  std::optional<int> frame_count;
  FrameRate frame_rate;
};

/// Picks kY4m for ".y4m" and kRaw otherwise.
VideoFormat format_from_path(const std::filesystem::path& path);

/// Reads a grayscale sequence. Y4M chroma planes are skipped (a warning is
/// printed to stderr once per file). `raw` is required for kRaw.
VideoSeq read_video(const std::filesystem::path& path, VideoFormat format,
                    const std::optional<RawGeometry>& raw = std::nullopt);

/// Writes a sequence. Y4M output is tagged Cmono.
void write_video(const VideoSeq& seq, const std::filesystem::path& path, VideoFormat format);

/// Binary PGM (P5) with maxval 255.
Frame read_pgm(const std::filesystem::path& path);
void write_pgm(const Frame& frame, const std::filesystem::path& path);

}  // namespace lpvc
