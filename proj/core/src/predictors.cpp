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

#include "lpvc/predictors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "lpvc/error.hpp"

namespace lpvc {

const char* to_string(PredictorKind kind) {
  switch (kind) {
    case PredictorKind::kFd: return "fd";
    case PredictorKind::kBmc: return "bmc";
    case PredictorKind::kLfp: return "lfp";
  }
  return "?";
}

PredictorKind parse_predictor(std::string_view name) {
  if (name == "fd") return PredictorKind::kFd;
  if (name == "bmc") return PredictorKind::kBmc;
  if (name == "lfp") return PredictorKind::kLfp;
  throw InvalidArgument("unknown predictor '" + std::string(name) + "' (expected fd, bmc or lfp)");
}

MotionField MotionField::zeros(int width, int height) {
  MotionField f;
  f.blocks_x = (width + kMotionBlockSize - 1) / kMotionBlockSize;
  f.blocks_y = (height + kMotionBlockSize - 1) / kMotionBlockSize;
  f.mvs.assign(static_cast<std::size_t>(f.blocks_x) * f.blocks_y, MotionVector{});
  return f;
}

Prediction fd_predict(const Frame& past) { return {past, std::nullopt}; }

std::uint8_t half_pel_sample(const Frame& ref, int hx, int hy) {
  const int x0 = hx >> 1;
  const int y0 = hy >> 1;
  const int x1 = x0 + (hx & 1);
  const int y1 = y0 + (hy & 1);
  const int sum = ref.clamped(x0, y0) + ref.clamped(x1, y0) + ref.clamped(x0, y1) + ref.clamped(x1, y1);
  // Four samples (some possibly repeated); values are non-negative so
  // adding half the divisor rounds half away from zero.
  return static_cast<std::uint8_t>((sum + 2) / 4);
}

namespace {

// Half-pel interpolated reference with a replicated margin so every
// candidate of the search can be read without clamping.
class HalfPelPlane {
 public:
  HalfPelPlane(const Frame& ref, int margin_x, int margin_y, int span_w, int span_h)
      : origin_x_(margin_x), origin_y_(margin_y), stride_(span_w + 2 * margin_x) {
    const int rows = span_h + 2 * margin_y;
    // Clamping half-pel coordinates to [0, 2(W-1)] matches clamping the
    // neighbour indices inside half_pel_sample.
    const int max_hx = 2 * (ref.width() - 1);
    const int max_hy = 2 * (ref.height() - 1);
    std::vector<std::uint8_t> core(static_cast<std::size_t>(max_hx + 1) * (max_hy + 1));
    for (int hy = 0; hy <= max_hy; ++hy)
      for (int hx = 0; hx <= max_hx; ++hx)
        core[static_cast<std::size_t>(hy) * (max_hx + 1) + hx] = half_pel_sample(ref, hx, hy);
    data_.resize(static_cast<std::size_t>(stride_) * rows);
    for (int r = 0; r < rows; ++r) {
      const int hy = std::clamp(r - origin_y_, 0, max_hy);
      for (int c = 0; c < stride_; ++c) {
        const int hx = std::clamp(c - origin_x_, 0, max_hx);
        data_[static_cast<std::size_t>(r) * stride_ + c] = core[static_cast<std::size_t>(hy) * (max_hx + 1) + hx];
      }
    }
  }

  const std::uint8_t* at(int hx, int hy) const {
    return data_.data() + static_cast<std::size_t>(hy + origin_y_) * stride_ + (hx + origin_x_);
  }

 private:
  int origin_x_;
  int origin_y_;
  int stride_;
  std::vector<std::uint8_t> data_;
};

}  // namespace

MotionSearchResult bmc_search(const Frame& current, const Frame& ref, const MotionSearchConfig& config) {
  if (!current.same_dims(ref) || current.empty()) throw InvalidArgument("bmc_search: frame dimensions differ");
  if (config.search_range < 0) throw InvalidArgument("bmc_search: negative search range");
  constexpr int B = kMotionBlockSize;
  const int range = 2 * config.search_range;
  MotionSearchResult result;
  result.field = MotionField::zeros(current.width(), current.height());
  result.costs.assign(result.field.mvs.size(), 0);

  const int span_w = 2 * result.field.blocks_x * B;
  const int span_h = 2 * result.field.blocks_y * B;
  const HalfPelPlane plane(ref, range + 1, range + 1, span_w, span_h);

  std::array<int, B * B> block{};
  for (int by = 0; by < result.field.blocks_y; ++by)
    for (int bx = 0; bx < result.field.blocks_x; ++bx) {
      for (int y = 0; y < B; ++y)
        for (int x = 0; x < B; ++x) block[static_cast<std::size_t>(y * B + x)] = current.clamped(bx * B + x, by * B + y);

      std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
      int best_l1 = std::numeric_limits<int>::max();
      MotionVector best_mv;
      for (int dy = -range; dy <= range; ++dy)
        for (int dx = -range; dx <= range; ++dx) {
          std::uint64_t cost = 0;
          for (int y = 0; y < B && cost <= best; ++y) {
            const std::uint8_t* row = plane.at(2 * bx * B + dx, 2 * (by * B + y) + dy);
            const int* cur = block.data() + y * B;
            for (int x = 0; x < B; ++x) {
              const int d = cur[x] - int(row[2 * x]);
              cost += config.cost == MatchCost::kSad ? std::uint64_t(std::abs(d)) : std::uint64_t(d * d);
            }
          }
          const int l1 = std::abs(dx) + std::abs(dy);
          if (cost < best || (cost == best && l1 < best_l1)) {
            best = cost;
            best_l1 = l1;
            best_mv = {dx, dy};
          }
        }
      result.field.at(bx, by) = best_mv;
      result.costs[static_cast<std::size_t>(by) * result.field.blocks_x + bx] = best;
    }
  return result;
}

Frame bmc_compensate(const Frame& ref, const MotionField& field) {
  const auto expected = MotionField::zeros(ref.width(), ref.height());
  if (field.blocks_x != expected.blocks_x || field.blocks_y != expected.blocks_y ||
      field.mvs.size() != expected.mvs.size())
    throw InvalidArgument("motion field does not match the frame's block grid");
  Frame out(ref.width(), ref.height());
  for (int y = 0; y < ref.height(); ++y)
    for (int x = 0; x < ref.width(); ++x) {
      const auto& mv = field.at(x / kMotionBlockSize, y / kMotionBlockSize);
      out.at(x, y) = half_pel_sample(ref, 2 * x + mv.dx, 2 * y + mv.dy);
    }
  return out;
}

Tensor frames_to_tensor(std::span<const Frame> frames) {
  if (frames.empty()) throw InvalidArgument("no frames to stack");
  const int w = frames.front().width();
  const int h = frames.front().height();
  Tensor t({static_cast<int>(frames.size()), h, w});
  for (std::size_t c = 0; c < frames.size(); ++c) {
    if (!frames[c].same_dims(frames.front())) throw InvalidArgument("frame dimensions differ");
    const auto s = frames[c].samples();
    auto dst = t.data().subspan(c * s.size(), s.size());
    for (std::size_t i = 0; i < s.size(); ++i) dst[i] = s[i] / 127.5 - 1.0;
  }
  return t;
}

Frame tensor_to_frame(const Tensor& t) {
  if (t.rank() != 3 || t.dim(0) != 1) throw InvalidArgument("expected a (1,H,W) tensor");
  Frame f(t.dim(2), t.dim(1));
  auto s = f.samples();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double v = std::round((t[i] + 1.0) * 127.5);
    s[i] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
  }
  return f;
}

Prediction lfp_predict(std::span<const Frame> past, const Generator& net) {
  if (static_cast<int>(past.size()) != net.config().k)
    throw ConfigMismatch("lfp_predict needs exactly K=" + std::to_string(net.config().k) + " past frames, got " +
                         std::to_string(past.size()));
  return {tensor_to_frame(net.forward(frames_to_tensor(past))), std::nullopt};
}

namespace {

class FdPredictor final : public FramePredictor {
 public:
  PredictorKind kind() const override { return PredictorKind::kFd; }
  int context_size() const override { return 1; }
  Prediction predict(std::span<const Frame> past, const Frame&) const override { return fd_predict(past.back()); }
  Frame reconstruct(std::span<const Frame> past, const MotionField*) const override { return past.back(); }
};

class BmcPredictor final : public FramePredictor {
 public:
  explicit BmcPredictor(MotionSearchConfig config) : config_(config) {}
  PredictorKind kind() const override { return PredictorKind::kBmc; }
  int context_size() const override { return 1; }
  Prediction predict(std::span<const Frame> past, const Frame& current) const override {
    auto search = bmc_search(current, past.back(), config_);
    Frame frame = bmc_compensate(past.back(), search.field);
    return {std::move(frame), std::move(search.field)};
  }
  Frame reconstruct(std::span<const Frame> past, const MotionField* side_info) const override {
    if (!side_info) throw DataError("BMC frame without motion vectors");
    return bmc_compensate(past.back(), *side_info);
  }

 private:
  MotionSearchConfig config_;
};

class LfpPredictor final : public FramePredictor {
 public:
  explicit LfpPredictor(const Generator& net) : net_(net) {}
  PredictorKind kind() const override { return PredictorKind::kLfp; }
  int context_size() const override { return net_.config().k; }
  Prediction predict(std::span<const Frame> past, const Frame&) const override { return lfp_predict(past, net_); }
  Frame reconstruct(std::span<const Frame> past, const MotionField*) const override {
    return lfp_predict(past, net_).frame;
  }

 private:
  const Generator& net_;
};

}  // namespace

std::unique_ptr<FramePredictor> make_fd_predictor() { return std::make_unique<FdPredictor>(); }

std::unique_ptr<FramePredictor> make_bmc_predictor(MotionSearchConfig config) {
  return std::make_unique<BmcPredictor>(config);
}

std::unique_ptr<FramePredictor> make_lfp_predictor(const Generator& net) { return std::make_unique<LfpPredictor>(net); }

}  // namespace lpvc
