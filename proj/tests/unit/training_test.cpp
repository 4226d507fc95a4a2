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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include "lpvc/dataset.hpp"
#include "lpvc/error.hpp"
#include "lpvc/losses.hpp"
#include "lpvc/trainer.hpp"
#include "test_util.hpp"

namespace lpvc {
namespace {

using testing::random_frame;
using testing::translating_sequence;

VideoSeq static_video(int w, int h, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  VideoSeq v;
  v.frames.assign(static_cast<std::size_t>(n), random_frame(w, h, rng));
  return v;
}

VideoSeq noise_video(int w, int h, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  VideoSeq v;
  for (int i = 0; i < n; ++i) v.frames.push_back(random_frame(w, h, rng));
  return v;
}

// Nine 48x48 patches of a texture moving one pixel per frame.
std::vector<PatchSeq> moving_patches(int count, std::uint64_t seed) {
  std::vector<VideoSeq> videos{translating_sequence(96, 96, 20, 1, 0, seed)};
  ExtractConfig cfg;
  cfg.motion_threshold = 0.0;
  cfg.seed = seed;
  return extract_patches(videos, cfg, static_cast<std::size_t>(count)).patches;
}

// ---------------------------------------------------------------- losses

TEST(LpLoss, UnitExamples) {
  const Tensor x({2}, std::vector<double>{0, 2}), y({2}, std::vector<double>{1, 1});
  EXPECT_EQ(lp_loss(x, y, 1), 1.0);
  EXPECT_EQ(lp_loss(x, y, 2), 1.0);
  EXPECT_EQ(lp_loss(x, x, 2), 0.0);
  EXPECT_THROW(lp_loss(x, Tensor({3}), 2), InvalidArgument);
  EXPECT_THROW(lp_loss(x, y, 3), InvalidArgument);
}

TEST(LpLoss, Gradients) {
  const Tensor x({3}, std::vector<double>{0, 2, 1}), y({3}, std::vector<double>{1, 1, 1});
  Tensor g;
  lp_loss(x, y, 1, &g);
  EXPECT_EQ(g, Tensor({3}, std::vector<double>{-1.0 / 3, 1.0 / 3, 0.0}));
  lp_loss(x, y, 2, &g);
  EXPECT_EQ(g, Tensor({3}, std::vector<double>{-2.0 / 3, 2.0 / 3, 0.0}));
}

TEST(BceLoss, UnitExamples) {
  EXPECT_DOUBLE_EQ(bce_loss(0.5, 1.0), std::log(2.0));
  EXPECT_NEAR(bce_loss(1.0 - kBceEps, 1.0), 0.0, 1e-6);
  EXPECT_NEAR(bce_loss(kBceEps, 1.0), -std::log(1e-7), 1e-9);
  EXPECT_NEAR(bce_loss(0.0, 1.0), 16.118, 1e-3);
  EXPECT_DOUBLE_EQ(bce_loss(0.25, 0.0), -std::log(0.75));
}

TEST(GeneratorLoss, ReducesToWeightedMseWhenDiscriminatorIsFooled) {
  std::mt19937_64 rng(1);
  const auto x = testing::random_tensor({1, 4, 4}, rng), y = testing::random_tensor({1, 4, 4}, rng);
  EXPECT_EQ(generator_loss(x, y, 1.0, LossWeights{}), 0.95 * lp_loss(x, y, 2));
  EXPECT_NEAR(generator_loss(y, y, 0.5, LossWeights{}), 0.05 * std::log(2.0), 1e-15);
  EXPECT_NEAR(generator_loss(y, y, 0.5, LossWeights{}), 0.03466, 1e-5);
}

TEST(GeneratorLoss, ComposesComponentOracles) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int i = 0; i < 20; ++i) {
    const auto x = testing::random_tensor({1, 3, 5}, rng), y = testing::random_tensor({1, 3, 5}, rng);
    const double s = u(rng);
    const LossWeights w{u(rng), u(rng)};
    EXPECT_NEAR(generator_loss(x, y, s, w), w.mse * lp_loss(x, y, 2) + w.adv * bce_loss(s, 1.0), 1e-12);
    Tensor gx;
    double gs = 0.0;
    generator_loss(x, y, s, w, &gx, &gs);
    EXPECT_NEAR(gs, -w.adv / s, 1e-12);
  }
}

TEST(GeneratorLoss, ZeroAdversarialWeightIsPlainMse) {
  std::mt19937_64 rng(3);
  const auto x = testing::random_tensor({1, 4, 4}, rng), y = testing::random_tensor({1, 4, 4}, rng);
  EXPECT_EQ(generator_loss(x, y, 0.3, LossWeights{1.0, 0.0}), lp_loss(x, y, 2));
}

// ---------------------------------------------------------------- dataset

TEST(Extract, StaticSourceAcceptanceNearFivePercent) {
  std::vector<VideoSeq> v{static_video(64, 64, 12, 4)};
  ExtractConfig cfg;
  cfg.seed = 5;
  const auto r = sample_patches(v, cfg, 10000);
  EXPECT_EQ(r.stats.trials, 10000u);
  EXPECT_EQ(r.stats.high_motion, 0u);
  const double rate = static_cast<double>(r.stats.accepted) / 10000.0;
  EXPECT_GE(rate, 0.03);
  EXPECT_LE(rate, 0.07);
}

TEST(Extract, NoiseSourceIsAlwaysAccepted) {
  std::vector<VideoSeq> v{noise_video(64, 64, 10, 6)};
  const auto r = extract_patches(v, ExtractConfig{}, 200);
  EXPECT_EQ(r.stats.trials, 200u);
  EXPECT_EQ(r.stats.high_motion, 200u);
  for (const auto& p : r.patches) {
    EXPECT_EQ(p.samples.size(), 9u * 48 * 48);
    EXPECT_TRUE(has_sufficient_motion(p, 25.0));
  }
}

TEST(Extract, SameSeedSamePatches) {
  std::vector<VideoSeq> v{noise_video(60, 50, 11, 7), static_video(50, 60, 9, 8)};
  ExtractConfig cfg;
  cfg.seed = 99;
  const auto a = extract_patches(v, cfg, 30), b = extract_patches(v, cfg, 30);
  EXPECT_EQ(a.patches, b.patches);
  cfg.seed = 100;
  EXPECT_NE(extract_patches(v, cfg, 30).patches, a.patches);
}

TEST(Extract, PatchesAreCopiedFromTheSource) {
  const auto video = noise_video(50, 49, 9, 9);
  std::vector<VideoSeq> v{video};
  const auto r = extract_patches(v, ExtractConfig{}, 5);
  for (const auto& p : r.patches) {
    // With 9 frames the start is fixed; locate the top-left sample by search.
    bool found = false;
    for (int y0 = 0; y0 <= 1 && !found; ++y0)
      for (int x0 = 0; x0 <= 2 && !found; ++x0) {
        bool ok = true;
        for (int t = 0; t < 9 && ok; ++t)
          for (int y = 0; y < 48 && ok; ++y)
            for (int x = 0; x < 48 && ok; ++x) ok = p.frame(t)[y * 48 + x] == video.frames[t].at(x0 + x, y0 + y);
        found = ok;
      }
    EXPECT_TRUE(found);
  }
}

TEST(Extract, WeightsScaleSelectionFrequency) {
  std::vector<VideoSeq> v{noise_video(48, 48, 9, 10), noise_video(48, 48, 9, 11)};
  ExtractConfig cfg;
  cfg.video_weights = {3.0, 1.0};
  cfg.seed = 12;
  const auto r = extract_patches(v, cfg, 10000);
  double n0 = 0;
  for (const auto& p : r.patches) n0 += p.source == 0;
  const double e0 = 7500.0, e1 = 2500.0;
  const double chi2 = (n0 - e0) * (n0 - e0) / e0 + (10000 - n0 - e1) * (10000 - n0 - e1) / e1;
  EXPECT_LT(chi2, 10.83);  // one degree of freedom, p = 0.001
}

TEST(Extract, GeometryErrors) {
  std::vector<VideoSeq> small{noise_video(40, 64, 9, 1)};
  EXPECT_THROW(extract_patches(small, ExtractConfig{}, 1), InvalidArgument);
  std::vector<VideoSeq> short_clip{noise_video(64, 64, 8, 1)};
  EXPECT_THROW(extract_patches(short_clip, ExtractConfig{}, 1), InvalidArgument);
  std::vector<VideoSeq> ok{noise_video(64, 64, 9, 1)};
  ExtractConfig bad;
  bad.low_motion_accept_prob = 1.5;
  EXPECT_THROW(extract_patches(ok, bad, 1), InvalidArgument);
  ExtractConfig mismatch;
  mismatch.video_weights = {1.0, 2.0};
  EXPECT_THROW(extract_patches(ok, mismatch, 1), InvalidArgument);
  std::vector<VideoSeq> still{static_video(48, 48, 9, 2)};
  ExtractConfig never;
  never.low_motion_accept_prob = 0.0;
  EXPECT_THROW(extract_patches(still, never, 1, 50), DataError);
}

TEST(DatasetFile, RoundTrip) {
  testing::TempDir dir("ds");
  std::vector<VideoSeq> v{noise_video(64, 64, 10, 13)};
  auto patches = extract_patches(v, ExtractConfig{}, 4).patches;
  write_dataset(patches, dir / "d.lfpd");
  const auto back = read_dataset(dir / "d.lfpd");
  ASSERT_EQ(back.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(back[i].samples, patches[i].samples);
  EXPECT_EQ(std::filesystem::file_size(dir / "d.lfpd"), 8u + 4u * 9 * 48 * 48);
}

TEST(DatasetFile, RejectsDamage) {
  testing::TempDir dir("ds");
  {
    std::ofstream out(dir / "bad.lfpd", std::ios::binary);
    out << "LFPD" << std::string("\x02\x00\x00\x00", 4) << std::string(100, 'x');
  }
  EXPECT_THROW(read_dataset(dir / "bad.lfpd"), DataError);
  {
    std::ofstream out(dir / "magic.lfpd", std::ios::binary);
    out << "XXXX" << std::string(4, '\0');
  }
  EXPECT_THROW(read_dataset(dir / "magic.lfpd"), DataError);
}

// ---------------------------------------------------------------- training

TEST(TensorBuilders, ContextTargetAndSequence) {
  const auto p = moving_patches(1, 14).front();
  const auto ctx = context_tensor(p, 4);
  EXPECT_EQ(ctx.shape(), (std::vector<int>{4, 48, 48}));
  EXPECT_DOUBLE_EQ(ctx.at(3, 5, 7), p.frame(7)[5 * 48 + 7] / 127.5 - 1.0);
  EXPECT_DOUBLE_EQ(ctx.at(0, 0, 0), p.frame(4)[0] / 127.5 - 1.0);
  const auto tgt = target_tensor(p);
  EXPECT_DOUBLE_EQ(tgt.at(0, 1, 2), p.frame(8)[50] / 127.5 - 1.0);
  const Tensor gen({1, 48, 48}, 0.25);
  const auto seq = sequence_tensor(p, &gen);
  EXPECT_EQ(seq.dim(0), 9);
  EXPECT_EQ(seq.at(8, 10, 10), 0.25);
  EXPECT_EQ(seq.at(7, 10, 10), ctx.at(3, 10, 10));
  EXPECT_THROW(context_tensor(p, 9), ConfigMismatch);
}

TEST(TrainLp, OverfitsOneBatch) {
  const auto data = moving_patches(2, 15);
  TrainConfig cfg;
  cfg.iterations = 200;
  cfg.batch_generator = 2;
  cfg.lr_generator = 2e-3;
  const auto r = train_lp(data, Generator(NetConfig{}, Init::kUniformFanIn, 16), cfg);
  ASSERT_EQ(r.loss_trace.size(), 200u);
  EXPECT_LT(r.loss_trace.back(), 0.1 * r.loss_trace.front());
}

TEST(TrainLp, ZeroLearningRateLeavesWeights) {
  const auto data = moving_patches(2, 17);
  TrainConfig cfg;
  cfg.iterations = 3;
  cfg.batch_generator = 1;
  cfg.lr_generator = 0.0;
  const Generator init(NetConfig{2, 1, 4}, Init::kUniformFanIn, 18);
  EXPECT_EQ(train_lp(data, init, cfg).generator.weights(), init.weights());
}

TEST(TrainLp, DeterministicForSeed) {
  const auto data = moving_patches(5, 19);
  TrainConfig cfg;
  cfg.iterations = 5;
  cfg.batch_generator = 2;
  cfg.loss = LossKind::kL1;
  const Generator init(NetConfig{2, 1, 4}, Init::kUniformFanIn, 20);
  const auto a = train_lp(data, init, cfg), b = train_lp(data, init, cfg);
  EXPECT_EQ(a.loss_trace, b.loss_trace);
  EXPECT_EQ(a.generator.weights(), b.generator.weights());
}

TEST(TrainLp, SmoothedLossDecreases) {
  const auto data = moving_patches(2, 21);
  TrainConfig cfg;
  cfg.iterations = 200;
  cfg.batch_generator = 2;
  cfg.lr_generator = 1e-3;
  const auto r = train_lp(data, Generator(NetConfig{2, 1, 8}, Init::kUniformFanIn, 22), cfg);
  auto window = [&](int start) {
    return std::accumulate(r.loss_trace.begin() + start, r.loss_trace.begin() + start + 50, 0.0) / 50.0;
  };
  for (int s = 50; s + 50 <= 200; s += 50) EXPECT_LT(window(s), window(s - 50)) << s;
}

TEST(TrainLp, DivergenceIsReported) {
  const auto data = moving_patches(1, 23);
  Generator g(NetConfig{2, 1, 4}, Init::kUniformFanIn, 24);
  g.weights().params[0].value[0] = std::numeric_limits<double>::infinity();
  TrainConfig cfg;
  cfg.iterations = 2;
  cfg.batch_generator = 1;
  EXPECT_THROW(train_lp(data, g, cfg), TrainingError);
}

TEST(TrainLp, ConfigErrors) {
  const auto data = moving_patches(1, 25);
  TrainConfig cfg;
  cfg.batch_generator = 0;
  EXPECT_THROW(train_lp(data, Generator(NetConfig{}, Init::kZeros), cfg), InvalidArgument);
  EXPECT_THROW(train_lp({}, Generator(NetConfig{}, Init::kZeros), TrainConfig{}), InvalidArgument);
  EXPECT_EQ(parse_loss("gan"), LossKind::kGan);
  EXPECT_THROW(parse_loss("l3"), InvalidArgument);
  const auto gan = TrainConfig::gan_defaults();
  EXPECT_EQ(gan.lr_generator, 1e-6);
  EXPECT_EQ(gan.lr_discriminator, 1e-5);
  EXPECT_EQ(gan.batch_generator, 16);
  EXPECT_EQ(gan.batch_discriminator, 32);
}

TEST(TrainGan, OneAlternationMovesBothNetworks) {
  const auto data = moving_patches(4, 26);
  TrainConfig cfg = TrainConfig::gan_defaults();
  cfg.iterations = 1;
  cfg.batch_generator = 2;
  cfg.batch_discriminator = 2;
  const Generator g(NetConfig{2, 1, 4}, Init::kUniformFanIn, 27);
  const Discriminator d(DiscConfig{9, 4, 4, 7, 48}, Init::kUniformFanIn, 28);
  const auto r = train_gan(data, g, d, cfg);
  EXPECT_NE(r.generator.weights(), g.weights());
  EXPECT_NE(r.discriminator.weights(), d.weights());
  EXPECT_EQ(r.generator_trace.size(), 1u);
  EXPECT_EQ(r.discriminator_trace.size(), 1u);
}

TEST(TrainGan, SaturatedScoresKeepFiniteGradient) {
  // The clamp passes the surrogate gradient through, so a saturated wrong
  // answer still pushes the discriminator back.
  double g = 0.0;
  EXPECT_NEAR(bce_loss(1.0, 1.0, &g), 0.0, 1e-6);
  EXPECT_NEAR(g, -1.0, 1e-6);
  EXPECT_NEAR(bce_loss(0.0, 1.0, &g), -std::log(kBceEps), 1e-9);
  EXPECT_NEAR(g, -1.0 / kBceEps, 1.0);
}

TEST(TrainGan, DiscriminatorLearnsToSeparate) {
  const auto data = moving_patches(24, 29);
  const std::vector<PatchSeq> train(data.begin(), data.begin() + 16), held(data.begin() + 16, data.end());
  std::vector<double> acc;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    TrainConfig cfg = TrainConfig::gan_defaults();
    cfg.iterations = 500;
    cfg.batch_generator = 1;
    cfg.batch_discriminator = 2;
    cfg.lr_discriminator = 1e-3;
    cfg.seed = seed;
    const auto r = train_gan(train, Generator(NetConfig{2, 1, 4}, Init::kUniformFanIn, seed),
                             Discriminator(DiscConfig{9, 4, 4, 7, 48}, Init::kUniformFanIn, seed + 10), cfg);
    acc.push_back(discriminator_accuracy(r.discriminator, r.generator, held));
  }
  const double mean = (acc[0] + acc[1] + acc[2]) / 3.0;
  // Chance level is 0.5; the binomial sigma of the mean over 3 x 16 calls.
  const double sigma = std::sqrt(0.25 / (3.0 * 2.0 * held.size()));
  EXPECT_GT(mean, 0.5 + 3.0 * sigma) << acc[0] << " " << acc[1] << " " << acc[2];
}

}  // namespace
}  // namespace lpvc
