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
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "lpvc/dataset.hpp"
#include "lpvc/losses.hpp"
#include "lpvc/networks.hpp"

namespace lpvc {

enum class LossKind { kL1, kL2, kGan };

LossKind parse_loss(std::string_view name);

struct TrainConfig {
  LossKind loss = LossKind::kL2;
  LossWeights lambda;  // combined loss only
  double lr_generator = 1e-4;
  double lr_discriminator = 1e-5;
  int batch_generator = 32;
  int batch_discriminator = 32;  // half real, half generated
  int iterations = 100;
  std::uint64_t seed = 1;

  /// Learning rates 1e-6 / 1e-5 and batches 16 / 32 for adversarial training.
  static TrainConfig gan_defaults();
  void validate() const;
};

/// Network inputs built from a patch sequence, all normalised to [-1,1]:
/// the K patches preceding the target, the target, and the full stack with
/// the target optionally replaced by a generated patch.
Tensor context_tensor(const PatchSeq& seq, int k);
Tensor target_tensor(const PatchSeq& seq);
Tensor sequence_tensor(const PatchSeq& seq, const Tensor* generated = nullptr);

struct TrainResult {
  Generator generator;
  std::vector<double> loss_trace;  // mean minibatch loss per iteration
};

/// l1 or l2 training with Adam. Throws TrainingError on a non-finite loss.
TrainResult train_lp(std::span<const PatchSeq> dataset, Generator init, const TrainConfig& config);

struct GanResult {
  Generator generator;
  Discriminator discriminator;
  std::vector<double> generator_trace;
  std::vector<double> discriminator_trace;
};

/// Alternating discriminator / generator updates starting from a
/// pretrained generator.
GanResult train_gan(std::span<const PatchSeq> dataset, Generator pretrained, Discriminator init,
                    const TrainConfig& config);

/// Fraction of samples classified correctly: real sequences scoring > 0.5
/// and generated ones scoring < 0.5.
double discriminator_accuracy(const Discriminator& disc, const Generator& gen, std::span<const PatchSeq> samples);

/// CSV `iter,loss`.
void write_loss_trace(std::span<const double> trace, const std::filesystem::path& path);

}  // namespace lpvc
