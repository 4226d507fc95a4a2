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

#include "lpvc/media_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>

#include "lpvc/error.hpp"

namespace lpvc {

Frame::Frame(int width, int height, std::uint8_t fill) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw InvalidArgument("frame dimensions must be positive");
  samples_.assign(static_cast<std::size_t>(width) * height, fill);
}

Frame::Frame(int width, int height, std::vector<std::uint8_t> samples)
    : width_(width), height_(height), samples_(std::move(samples)) {
  if (width <= 0 || height <= 0) throw InvalidArgument("frame dimensions must be positive");
  if (samples_.size() != static_cast<std::size_t>(width) * height)
    throw InvalidArgument("frame sample count does not match width*height");
}

std::uint8_t Frame::clamped(int x, int y) const {
  x = std::clamp(x, 0, width_ - 1);
  y = std::clamp(y, 0, height_ - 1);
  return at(x, y);
}

void VideoSeq::validate() const {
  if (frames.empty()) throw InvalidArgument("video sequence is empty");
  for (const auto& f : frames) {
    if (f.empty() || !f.same_dims(frames.front()))
      throw InvalidArgument("video frames must share the same dimensions");
  }
  if (frame_rate.num <= 0 || frame_rate.den <= 0) throw InvalidArgument("frame rate must be positive");
}

double kbps(std::uint64_t payload_bits, std::size_t frame_count, FrameRate rate) {
  if (frame_count == 0) throw InvalidArgument("kbps over zero frames");
  return static_cast<double>(payload_bits) * rate.fps() / static_cast<double>(frame_count) / 1000.0;
}

VideoFormat format_from_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".y4m" ? VideoFormat::kY4m : VideoFormat::kRaw;
}

namespace {

std::vector<char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

int parse_positive(std::string_view text, const char* what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw DataError(std::string("malformed Y4M ") + what + " field");
  if (value <= 0) throw DataError(std::string("Y4M ") + what + " must be positive");
  return value;
}

struct Y4mHeader {
  int width = 0;
  int height = 0;
  FrameRate rate;
  std::size_t chroma_bytes = 0;  // per frame, skipped
};

std::size_t chroma_size(std::string_view tag, int w, int h) {
  const auto cw420 = static_cast<std::size_t>((w + 1) / 2);
  const auto ch420 = static_cast<std::size_t>((h + 1) / 2);
  if (tag.starts_with("420")) return 2 * cw420 * ch420;
  if (tag.starts_with("422")) return 2 * cw420 * static_cast<std::size_t>(h);
  if (tag.starts_with("444") && tag.size() == 3) return 2 * static_cast<std::size_t>(w) * h;
  if (tag == "mono") return 0;
  throw DataError("unsupported Y4M colorspace C" + std::string(tag));
}

Y4mHeader parse_y4m_header(std::string_view line) {
  std::istringstream tokens{std::string(line)};
  std::string tok;
  tokens >> tok;
  if (tok != "YUV4MPEG2") throw DataError("missing YUV4MPEG2 signature");
  Y4mHeader h;
  std::string colorspace = "420jpeg";
  bool have_rate = false;
  while (tokens >> tok) {
    const std::string_view v = std::string_view(tok).substr(1);
    switch (tok[0]) {
      case 'W': h.width = parse_positive(v, "width"); break;
      case 'H': h.height = parse_positive(v, "height"); break;
      case 'F': {
        const auto colon = v.find(':');
        if (colon == std::string_view::npos) throw DataError("malformed Y4M frame rate");
        h.rate.num = parse_positive(v.substr(0, colon), "frame rate");
        h.rate.den = parse_positive(v.substr(colon + 1), "frame rate");
        have_rate = true;
        break;
      }
      case 'C': colorspace = std::string(v); break;
      default: break;  // I, A, X tags carry nothing we need
    }
  }
  if (h.width == 0 || h.height == 0) throw DataError("Y4M header lacks W/H");
  if (!have_rate) h.rate = FrameRate{};
  h.chroma_bytes = chroma_size(colorspace, h.width, h.height);
  return h;
}

VideoSeq read_y4m(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  const std::string_view data(bytes.data(), bytes.size());
  auto eol = data.find('\n');
  if (eol == std::string_view::npos) throw DataError("malformed Y4M header in " + path.string());
  const auto header = parse_y4m_header(data.substr(0, eol));
  const std::size_t luma = static_cast<std::size_t>(header.width) * header.height;

  VideoSeq seq;
  seq.frame_rate = header.rate;
  std::size_t pos = eol + 1;
  while (pos < data.size()) {
    eol = data.find('\n', pos);
    if (eol == std::string_view::npos || !data.substr(pos, eol - pos).starts_with("FRAME"))
      throw DataError("malformed Y4M frame marker in " + path.string());
    pos = eol + 1;
    if (data.size() - pos < luma + header.chroma_bytes)
      throw DataError("truncated Y4M payload in " + path.string());
    const auto* first = reinterpret_cast<const std::uint8_t*>(data.data() + pos);
    seq.frames.emplace_back(header.width, header.height, std::vector<std::uint8_t>(first, first + luma));
    pos += luma + header.chroma_bytes;
  }
  if (seq.frames.empty()) throw DataError("Y4M file has no frames: " + path.string());
  if (header.chroma_bytes > 0)
    std::cerr << "warning: " << path.string() << ": chroma planes discarded, luma only\n";
  return seq;
}

VideoSeq read_raw(const std::filesystem::path& path, const RawGeometry& geo) {
  if (geo.width <= 0 || geo.height <= 0) throw InvalidArgument("raw video needs positive width/height");
  const auto bytes = slurp(path);
  const std::size_t luma = static_cast<std::size_t>(geo.width) * geo.height;
  if (bytes.size() % luma != 0)
    throw DataError("truncated raw payload: " + std::to_string(bytes.size()) + " bytes is not a multiple of " +
                    std::to_string(luma));
  const std::size_t count = bytes.size() / luma;
  if (geo.frame_count && static_cast<std::size_t>(*geo.frame_count) != count)
    throw DataError("raw file holds " + std::to_string(count) + " frames, expected " +
                    std::to_string(*geo.frame_count));
  if (count == 0) throw DataError("raw file is empty: " + path.string());
  VideoSeq seq;
  seq.frame_rate = geo.frame_rate;
  const auto* base = reinterpret_cast<const std::uint8_t*>(bytes.data());
  for (std::size_t i = 0; i < count; ++i)
    seq.frames.emplace_back(geo.width, geo.height,
                            std::vector<std::uint8_t>(base + i * luma, base + (i + 1) * luma));
  return seq;
}

void write_samples(std::ofstream& out, const Frame& f) {
  out.write(reinterpret_cast<const char*>(f.samples().data()), static_cast<std::streamsize>(f.size()));
}

// Skips whitespace and '#' comments between PGM header tokens.
std::size_t skip_pgm_space(std::string_view data, std::size_t pos) {
  while (pos < data.size()) {
    if (data[pos] == '#') {
      while (pos < data.size() && data[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(data[pos]))) {
      ++pos;
    } else {
      break;
    }
  }
  return pos;
}

int read_pgm_int(std::string_view data, std::size_t& pos) {
  pos = skip_pgm_space(data, pos);
  const auto start = pos;
  while (pos < data.size() && std::isdigit(static_cast<unsigned char>(data[pos]))) ++pos;
  int value = 0;
  auto [ptr, ec] = std::from_chars(data.data() + start, data.data() + pos, value);
  if (start == pos || ec != std::errc{}) throw DataError("malformed PGM header");
  return value;
}

}  // namespace

VideoSeq read_video(const std::filesystem::path& path, VideoFormat format, const std::optional<RawGeometry>& raw) {
  if (format == VideoFormat::kY4m) return read_y4m(path);
  if (!raw) throw InvalidArgument("raw video requires explicit width/height");
  return read_raw(path, *raw);
}

void write_video(const VideoSeq& seq, const std::filesystem::path& path, VideoFormat format) {
  seq.validate();
  auto out = open_out(path);
  if (format == VideoFormat::kY4m) {
    out << "YUV4MPEG2 W" << seq.width() << " H" << seq.height() << " F" << seq.frame_rate.num << ':'
        << seq.frame_rate.den << " Ip A1:1 Cmono\n";
  }
  for (const auto& f : seq.frames) {
    if (format == VideoFormat::kY4m) out << "FRAME\n";
    write_samples(out, f);
  }
  finish(out, path);
}

Frame read_pgm(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  const std::string_view data(bytes.data(), bytes.size());
  if (data.size() < 2 || data[0] != 'P') throw DataError("not a PGM file: " + path.string());
  if (data[1] != '5') throw DataError("only binary P5 PGM is supported, got P" + std::string(1, data[1]));
  std::size_t pos = 2;
  const int w = read_pgm_int(data, pos);
  const int h = read_pgm_int(data, pos);
  const int maxval = read_pgm_int(data, pos);
  if (w <= 0 || h <= 0) throw DataError("PGM dimensions must be positive");
  if (maxval != 255) throw DataError("PGM maxval must be 255, got " + std::to_string(maxval));
  if (pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[pos])))
    throw DataError("malformed PGM header");
  ++pos;
  const std::size_t n = static_cast<std::size_t>(w) * h;
  if (data.size() - pos < n) throw DataError("truncated PGM payload");
  const auto* first = reinterpret_cast<const std::uint8_t*>(data.data() + pos);
  return Frame(w, h, std::vector<std::uint8_t>(first, first + n));
}

void write_pgm(const Frame& frame, const std::filesystem::path& path) {
  if (frame.empty()) throw InvalidArgument("cannot write an empty frame");
  auto out = open_out(path);
  out << "P5\n" << frame.width() << ' ' << frame.height() << "\n255\n";
  write_samples(out, frame);
  finish(out, path);
}

}  // namespace lpvc
