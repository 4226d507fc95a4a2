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

#include "lpvc/pipeline.hpp"

#include <algorithm>
#include <cstring>
#include <deque>

#include "lpvc/error.hpp"
#include "lpvc/metrics.hpp"

namespace lpvc {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic{'L', 'P', 'V', 'C'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(in[pos + std::size_t(i)]) << (8 * i);
  return v;
}

std::unique_ptr<FramePredictor> make_predictor(PredictorKind kind, const MotionSearchConfig& motion,
                                               const Generator* net) {
  switch (kind) {
    case PredictorKind::kFd: return make_fd_predictor();
    case PredictorKind::kBmc: return make_bmc_predictor(motion);
    case PredictorKind::kLfp:
      if (!net) throw ConfigMismatch("the lfp predictor needs generator weights");
      return make_lfp_predictor(*net);
  }
  throw InvalidArgument("unknown predictor");
}

Plane residual_plane(const Frame& current, const Frame& prediction) {
  Plane r(current.width(), current.height());
  const auto c = current.samples();
  const auto p = prediction.samples();
  for (std::size_t i = 0; i < c.size(); ++i) r.values[i] = int(c[i]) - int(p[i]);
  return r;
}

Frame add_residual(const Frame& prediction, const Plane& residual) {
  Frame out(prediction.width(), prediction.height());
  const auto p = prediction.samples();
  auto o = out.samples();
  for (std::size_t i = 0; i < p.size(); ++i)
    o[i] = static_cast<std::uint8_t>(std::clamp(int(p[i]) + residual.values[i], 0, 255));
  return out;
}

// Context window of reconstructed frames; predictors read its tail.
class Context {
 public:
  explicit Context(std::size_t capacity) : capacity_(capacity) {}
  void push(Frame f) {
    frames_.push_back(std::move(f));
    if (frames_.size() > capacity_) frames_.erase(frames_.begin());
  }
  std::span<const Frame> tail(std::size_t n) const {
    return std::span<const Frame>(frames_).subspan(frames_.size() - n);
  }

 private:
  std::size_t capacity_;
  std::vector<Frame> frames_;
};

void check_lfp_k(const CodecConfig& config, const Generator* net) {
  if (config.predictor == PredictorKind::kLfp && net && net->config().k != config.k)
    throw ConfigMismatch("codec K=" + std::to_string(config.k) + " but the generator was built for K=" +
                         std::to_string(net->config().k));
}

}  // namespace

void CodecConfig::validate() const {
  if (k < 1) throw InvalidArgument("K must be >= 1");
  QuantParams::from_qp(qp);
  if (motion.search_range < 0) throw InvalidArgument("search range must be non-negative");
}

std::vector<std::uint8_t> BitstreamHeader::serialize() const {
  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  put_u32(out, version);
  put_u32(out, static_cast<std::uint32_t>(width));
  put_u32(out, static_cast<std::uint32_t>(height));
  put_u32(out, static_cast<std::uint32_t>(frame_count));
  put_u32(out, static_cast<std::uint32_t>(frame_rate.num));
  put_u32(out, static_cast<std::uint32_t>(frame_rate.den));
  put_u32(out, static_cast<std::uint32_t>(predictor));
  put_u32(out, static_cast<std::uint32_t>(k));
  put_u32(out, static_cast<std::uint32_t>(qp));
  return out;
}

BitstreamHeader BitstreamHeader::parse(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kSize) throw DataError("bitstream shorter than its header");
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) throw DataError("bad bitstream magic");
  BitstreamHeader h;
  h.version = get_u32(bytes, 4);
  if (h.version != kBitstreamVersion) throw DataError("unsupported bitstream version " + std::to_string(h.version));
  const auto field = [&](std::size_t i) { return get_u32(bytes, 8 + 4 * i); };
  constexpr std::uint32_t kLimit = 1u << 20;
  for (std::size_t i = 0; i < 8; ++i)
    if (field(i) > kLimit) throw DataError("bitstream header field out of range");
  h.width = static_cast<int>(field(0));
  h.height = static_cast<int>(field(1));
  h.frame_count = static_cast<int>(field(2));
  h.frame_rate = {static_cast<int>(field(3)), static_cast<int>(field(4))};
  if (field(5) > 2) throw DataError("unknown predictor id " + std::to_string(field(5)));
  h.predictor = static_cast<PredictorKind>(field(5));
  h.k = static_cast<int>(field(6));
  h.qp = static_cast<int>(field(7));
  if (h.width <= 0 || h.height <= 0 || h.frame_count <= 0) throw DataError("bitstream header has zero dimensions");
  if (h.frame_rate.num <= 0 || h.frame_rate.den <= 0) throw DataError("bitstream header has an invalid frame rate");
  if (h.k < 1) throw DataError("bitstream header has K < 1");
  if (h.qp < kMinQp || h.qp > kMaxQp) throw DataError("bitstream header qp out of range");
  return h;
}

void write_motion_field(BitWriter& out, const MotionField& field) {
  for (int by = 0; by < field.blocks_y; ++by) {
    MotionVector left;
    for (int bx = 0; bx < field.blocks_x; ++bx) {
      const auto& mv = field.at(bx, by);
      out.put_se(mv.dx - left.dx);
      out.put_se(mv.dy - left.dy);
      left = mv;
    }
  }
}

MotionField read_motion_field(BitReader& in, int width, int height, int max_abs_component) {
  MotionField field = MotionField::zeros(width, height);
  for (int by = 0; by < field.blocks_y; ++by) {
    MotionVector left;
    for (int bx = 0; bx < field.blocks_x; ++bx) {
      const std::int64_t dx = std::int64_t(left.dx) + in.get_se();
      const std::int64_t dy = std::int64_t(left.dy) + in.get_se();
      if (std::abs(dx) > max_abs_component || std::abs(dy) > max_abs_component)
        throw DataError("motion vector out of range");
      left = {static_cast<int>(dx), static_cast<int>(dy)};
      field.at(bx, by) = left;
    }
  }
  return field;
}

std::uint64_t EncodeResult::payload_bits() const {
  std::uint64_t total = 0;
  for (const auto& f : frames) total += f.bits();
  return total;
}

double EncodeResult::kbps() const { return lpvc::kbps(payload_bits(), frames.size(), reconstruction.frame_rate); }

double EncodeResult::mean_psnr() const {
  double sum = 0.0;
  for (const auto& f : frames) sum += f.reconstruction_psnr;
  return frames.empty() ? 0.0 : sum / static_cast<double>(frames.size());
}

EncodeResult encode_video(const VideoSeq& seq, const CodecConfig& config, const Generator* net) {
  seq.validate();
  config.validate();
  check_lfp_k(config, net);
  const auto predictor = make_predictor(config.predictor, config.motion, net);
  const auto q = QuantParams::from_qp(config.qp);
  const auto ctx_size = static_cast<std::size_t>(predictor->context_size());

  BitstreamHeader header;
  header.width = seq.width();
  header.height = seq.height();
  header.frame_count = static_cast<int>(seq.size());
  header.frame_rate = seq.frame_rate;
  header.predictor = config.predictor;
  header.k = config.k;
  header.qp = config.qp;

  EncodeResult result;
  result.bitstream = header.serialize();
  result.reconstruction.frame_rate = seq.frame_rate;
  Context context(std::max(ctx_size, std::size_t(config.k)));

  for (std::size_t i = 0; i < seq.size(); ++i) {
    const Frame& current = seq.frames[i];
    FrameStats stats;
    stats.index = static_cast<int>(i);
    BitWriter bits;
    Frame recon;
    if (i < static_cast<std::size_t>(config.k)) {
      stats.intra = true;
      recon = frame_from_intra(encode_plane_into(bits, intra_plane(current), PlaneKind::kIntra, q));
      stats.residual_bits = bits.bit_count();
    } else {
      const auto past = context.tail(ctx_size);
      Prediction pred = predictor->predict(past, current);
      if (pred.side_info) write_motion_field(bits, *pred.side_info);
      stats.mv_bits = bits.bit_count();
      const Plane decoded = encode_plane_into(bits, residual_plane(current, pred.frame), PlaneKind::kResidual, q);
      stats.residual_bits = bits.bit_count() - stats.mv_bits;
      stats.prediction_psnr = psnr(pred.frame, current);
      recon = add_residual(pred.frame, decoded);
    }
    stats.reconstruction_psnr = psnr(recon, current);
    const auto payload = bits.take();
    put_u32(result.bitstream, static_cast<std::uint32_t>(payload.size()));
    result.bitstream.insert(result.bitstream.end(), payload.begin(), payload.end());
    result.frames.push_back(stats);
    context.push(recon);
    result.reconstruction.frames.push_back(std::move(recon));
  }
  return result;
}

VideoSeq decode_video(std::span<const std::uint8_t> bitstream, const Generator* net) {
  const auto header = BitstreamHeader::parse(bitstream);
  CodecConfig config;
  config.predictor = header.predictor;
  config.k = header.k;
  config.qp = header.qp;
  check_lfp_k(config, net);
  const auto predictor = make_predictor(header.predictor, {}, net);
  const auto q = QuantParams::from_qp(header.qp);
  const auto ctx_size = static_cast<std::size_t>(predictor->context_size());
  // |dx| can never exceed twice the largest frame side in a valid stream.
  const int mv_limit = 4 * std::max(header.width, header.height) + 64;

  VideoSeq out;
  out.frame_rate = header.frame_rate;
  Context context(std::max(ctx_size, std::size_t(header.k)));
  std::size_t pos = BitstreamHeader::kSize;
  for (int i = 0; i < header.frame_count; ++i) {
    if (bitstream.size() - pos < 4) throw DataError("truncated bitstream: missing frame " + std::to_string(i));
    const std::uint32_t length = get_u32(bitstream, pos);
    pos += 4;
    if (bitstream.size() - pos < length) throw DataError("truncated bitstream: frame " + std::to_string(i));
    BitReader bits(bitstream.subspan(pos, length));
    pos += length;

    Frame recon;
    if (i < header.k) {
      recon = frame_from_intra(decode_plane_from(bits, header.width, header.height, PlaneKind::kIntra, q));
    } else {
      const auto past = context.tail(ctx_size);
      std::optional<MotionField> mvs;
      if (header.predictor == PredictorKind::kBmc) mvs = read_motion_field(bits, header.width, header.height, mv_limit);
      const Frame prediction = predictor->reconstruct(past, mvs ? &*mvs : nullptr);
      recon = add_residual(prediction,
                           decode_plane_from(bits, header.width, header.height, PlaneKind::kResidual, q));
    }
    context.push(recon);
    out.frames.push_back(std::move(recon));
  }
  if (pos != bitstream.size()) throw DataError("trailing bytes after the last frame");
  return out;
}

std::vector<PredictionScore> predict_only(const VideoSeq& seq, PredictorKind kind, const PredictOptions& options,
                                          const Generator* net) {
  seq.validate();
  const auto predictor = make_predictor(kind, options.motion, net);
  const auto ctx = static_cast<std::size_t>(predictor->context_size());
  if (seq.size() <= ctx)
    throw InvalidArgument("sequence of " + std::to_string(seq.size()) + " frames is shorter than the context of " +
                          std::to_string(ctx) + " + 1");
  std::vector<PredictionScore> scores;
  for (std::size_t i = ctx; i < seq.size(); ++i) {
    const std::span<const Frame> past(seq.frames.data() + (i - ctx), ctx);
    const auto pred = predictor->predict(past, seq.frames[i]);
    scores.push_back({static_cast<int>(i), psnr_cropped(pred.frame, seq.frames[i], options.crop)});
  }
  return scores;
}

}  // namespace lpvc
