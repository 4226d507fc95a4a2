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

// Microbenchmarks for the hot paths: convolution, motion search, the
// residual transform and a full generator forward pass.

#include <benchmark/benchmark.h>

#include <random>

#include "lpvc/networks.hpp"
#include "lpvc/layers.hpp"
#include "lpvc/predictors.hpp"
#include "lpvc/residual_codec.hpp"

namespace {

lpvc::Tensor noise(std::vector<int> shape, std::uint64_t seed) {
  lpvc::Tensor t(std::move(shape));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (auto& v : t.data()) v = d(rng);
  return t;
}

lpvc::Frame noise_frame(int w, int h, std::uint64_t seed) {
  lpvc::Frame f(w, h);
  std::mt19937_64 rng(seed);
  for (auto& v : f.samples()) v = static_cast<std::uint8_t>(rng() & 0xff);
  return f;
}

void BM_Conv2d(benchmark::State& state) {
  const auto c = static_cast<int>(state.range(0));
  const auto in = noise({c, 48, 48}, 1), k = noise({c, c, 3, 3}, 2), b = noise({c}, 3);
  for (auto _ : state) benchmark::DoNotOptimize(lpvc::conv2d(in, k, b, 1));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c * c * 9 * 48 * 48));
}
BENCHMARK(BM_Conv2d)->Arg(16)->Arg(64);

void BM_BmcSearch(benchmark::State& state) {
  const auto cur = noise_frame(176, 144, 4), ref = noise_frame(176, 144, 5);
  const lpvc::MotionSearchConfig cfg{static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(lpvc::bmc_search(cur, ref, cfg));
}
BENCHMARK(BM_BmcSearch)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Dct8(benchmark::State& state) {
  lpvc::Block8 b;
  std::mt19937_64 rng(6);
  for (auto& v : b) v = static_cast<double>(rng() % 511) - 255.0;
  for (auto _ : state) benchmark::DoNotOptimize(lpvc::dct8_forward(b));
}
BENCHMARK(BM_Dct8);

void BM_EncodePlane(benchmark::State& state) {
  const auto f = noise_frame(176, 144, 7);
  const auto plane = lpvc::intra_plane(f);
  const auto q = lpvc::QuantParams::from_qp(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(lpvc::encode_plane(plane, lpvc::PlaneKind::kIntra, q));
}
BENCHMARK(BM_EncodePlane)->Arg(22)->Arg(37)->Unit(benchmark::kMicrosecond);

void BM_GeneratorForward(benchmark::State& state) {
  const lpvc::NetConfig cfg{4, static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 3, 0.1};
  const lpvc::Generator g(cfg, lpvc::Init::kUniformFanIn, 8);
  const auto ctx = noise({4, 48, 48}, 9);
  for (auto _ : state) benchmark::DoNotOptimize(g.forward(ctx));
}
BENCHMARK(BM_GeneratorForward)->Args({2, 16})->Args({8, 64})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
