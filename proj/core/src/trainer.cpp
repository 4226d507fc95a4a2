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

#include "lpvc/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>

#include "lpvc/adam.hpp"
#include "lpvc/error.hpp"

namespace lpvc {

LossKind parse_loss(std::string_view name) {
  if (name == "l1") return LossKind::kL1;
  if (name == "l2") return LossKind::kL2;
  if (name == "gan") return LossKind::kGan;
  throw InvalidArgument("unknown loss '" + std::string(name) + "' (expected l1, l2 or gan)");
}

TrainConfig TrainConfig::gan_defaults() {
  TrainConfig c;
  c.loss = LossKind::kGan;
  c.lr_generator = 1e-6;
  c.lr_discriminator = 1e-5;
  c.batch_generator = 16;
  c.batch_discriminator = 32;
  return c;
}

void TrainConfig::validate() const {
  if (batch_generator < 1 || batch_discriminator < 2) throw InvalidArgument("batch sizes must be >= 1 (>= 2 for D)");
  if (iterations < 0) throw InvalidArgument("iteration count must be non-negative");
  if (!(lr_generator >= 0.0) || !(lr_discriminator >= 0.0)) throw InvalidArgument("learning rates must be >= 0");
}

namespace {

Tensor normalized_patch(const PatchSeq& seq, int t) {
  const auto f = seq.frame(t);
  Tensor out({1, seq.size, seq.size});
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] / 127.5 - 1.0;
  return out;
}

// Deterministic minibatch stream: reshuffled epochs over the dataset.
class BatchSampler {
 public:
  BatchSampler(std::size_t n, std::uint64_t seed) : order_(n), rng_(seed) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    cursor_ = n;
  }

  std::vector<std::size_t> next(int count) {
    std::vector<std::size_t> batch;
    batch.reserve(static_cast<std::size_t>(count));
    while (batch.size() < static_cast<std::size_t>(count)) {
      if (cursor_ == order_.size()) {
        std::shuffle(order_.begin(), order_.end(), rng_);
        cursor_ = 0;
      }
      batch.push_back(order_[cursor_++]);
    }
    return batch;
  }

 private:
  std::vector<std::size_t> order_;
  std::mt19937_64 rng_;
  std::size_t cursor_;
};

void check_finite(double loss, int iteration, const char* what) {
  if (!std::isfinite(loss))
    throw TrainingError(std::string(what) + " loss diverged (non-finite) at iteration " + std::to_string(iteration));
}

void check_dataset(std::span<const PatchSeq> dataset, int k) {
  if (dataset.empty()) throw InvalidArgument("training dataset is empty");
  for (const auto& s : dataset)
    if (s.frames - 1 < k) throw ConfigMismatch("patch sequences carry fewer context frames than K");
}

}  // namespace

Tensor context_tensor(const PatchSeq& seq, int k) {
  const int first = seq.frames - 1 - k;
  if (first < 0) throw ConfigMismatch("patch sequence too short for K=" + std::to_string(k));
  Tensor out({k, seq.size, seq.size});
  const auto n = static_cast<std::size_t>(seq.size) * seq.size;
  for (int c = 0; c < k; ++c) {
    const auto f = seq.frame(first + c);
    for (std::size_t i = 0; i < n; ++i) out[static_cast<std::size_t>(c) * n + i] = f[i] / 127.5 - 1.0;
  }
  return out;
}

Tensor target_tensor(const PatchSeq& seq) { return normalized_patch(seq, seq.frames - 1); }

Tensor sequence_tensor(const PatchSeq& seq, const Tensor* generated) {
  Tensor out({seq.frames, seq.size, seq.size});
  const auto n = static_cast<std::size_t>(seq.size) * seq.size;
  for (int c = 0; c < seq.frames; ++c) {
    const bool replace = generated && c == seq.frames - 1;
    if (replace && generated->size() != n) throw InvalidArgument("generated patch size mismatch");
    const auto f = seq.frame(c);
    for (std::size_t i = 0; i < n; ++i)
      out[static_cast<std::size_t>(c) * n + i] = replace ? (*generated)[i] : f[i] / 127.5 - 1.0;
  }
  return out;
}

TrainResult train_lp(std::span<const PatchSeq> dataset, Generator init, const TrainConfig& config) {
  config.validate();
  if (config.loss == LossKind::kGan) throw InvalidArgument("train_lp handles l1/l2; use train_gan");
  const int k = init.config().k;
  check_dataset(dataset, k);
  const int p = config.loss == LossKind::kL1 ? 1 : 2;

  TrainResult result{std::move(init), {}};
  Adam adam(result.generator.weights(), {.lr = config.lr_generator});
  BatchSampler sampler(dataset.size(), config.seed);
  for (int it = 0; it < config.iterations; ++it) {
    Gradients total = zero_gradients(result.generator.weights());
    double loss = 0.0;
    const auto batch = sampler.next(config.batch_generator);
    for (std::size_t idx : batch) {
      Generator::Tape tape;
      const Tensor out = result.generator.forward(context_tensor(dataset[idx], k), &tape);
      Tensor grad;
      loss += lp_loss(out, target_tensor(dataset[idx]), p, &grad);
      accumulate(total, result.generator.backward(tape, grad));
    }
    const double inv = 1.0 / static_cast<double>(batch.size());
    loss *= inv;
    check_finite(loss, it, "generator");
    scale(total, inv);
    adam.step(result.generator.weights(), total);
    result.loss_trace.push_back(loss);
  }
  return result;
}

GanResult train_gan(std::span<const PatchSeq> dataset, Generator pretrained, Discriminator init,
                    const TrainConfig& config) {
  config.validate();
  const int k = pretrained.config().k;
  check_dataset(dataset, k);
  GanResult result{std::move(pretrained), std::move(init), {}, {}};
  Generator& gen = result.generator;
  Discriminator& disc = result.discriminator;
  if (dataset.front().frames != disc.config().in_channels)
    throw ConfigMismatch("discriminator input channels do not match the patch sequence length");

  Adam adam_g(gen.weights(), {.lr = config.lr_generator});
  Adam adam_d(disc.weights(), {.lr = config.lr_discriminator});
  BatchSampler sampler(dataset.size(), config.seed);
  const int half = config.batch_discriminator / 2;

  for (int it = 0; it < config.iterations; ++it) {
    // Discriminator: `half` real sequences labelled 1, `half` generated ones labelled 0.
    {
      Gradients total = zero_gradients(disc.weights());
      double loss = 0.0;
      const auto real = sampler.next(half);
      const auto fake = sampler.next(half);
      auto visit = [&](const Tensor& input, double label) {
        Discriminator::Tape tape;
        const double score = disc.forward(input, &tape);
        double grad = 0.0;
        loss += bce_loss(score, label, &grad);
        accumulate(total, disc.backward(tape, grad));
      };
      for (std::size_t idx : real) visit(sequence_tensor(dataset[idx]), 1.0);
      for (std::size_t idx : fake) {
        const Tensor generated = gen.forward(context_tensor(dataset[idx], k));
        visit(sequence_tensor(dataset[idx], &generated), 0.0);
      }
      const double inv = 1.0 / (2.0 * half);
      loss *= inv;
      check_finite(loss, it, "discriminator");
      scale(total, inv);
      adam_d.step(disc.weights(), total);
      result.discriminator_trace.push_back(loss);
    }
    // Generator: combined MSE + adversarial loss, gradient through D's input.
    {
      Gradients total = zero_gradients(gen.weights());
      double loss = 0.0;
      const auto batch = sampler.next(config.batch_generator);
      for (std::size_t idx : batch) {
        const PatchSeq& seq = dataset[idx];
        Generator::Tape g_tape;
        const Tensor generated = gen.forward(context_tensor(seq, k), &g_tape);
        Discriminator::Tape d_tape;
        const double score = disc.forward(sequence_tensor(seq, &generated), &d_tape);
        Tensor grad_x;
        double grad_score = 0.0;
        loss += generator_loss(generated, target_tensor(seq), score, config.lambda, &grad_x, &grad_score);
        Tensor grad_seq;
        disc.backward(d_tape, grad_score, &grad_seq);
        const auto n = generated.size();
        const auto last = grad_seq.data().subspan(static_cast<std::size_t>(seq.frames - 1) * n, n);
        for (std::size_t i = 0; i < n; ++i) grad_x[i] += last[i];
        accumulate(total, gen.backward(g_tape, grad_x));
      }
      const double inv = 1.0 / static_cast<double>(batch.size());
      loss *= inv;
      check_finite(loss, it, "generator");
      scale(total, inv);
      adam_g.step(gen.weights(), total);
      result.generator_trace.push_back(loss);
    }
  }
  return result;
}

double discriminator_accuracy(const Discriminator& disc, const Generator& gen, std::span<const PatchSeq> samples) {
  if (samples.empty()) throw InvalidArgument("no samples to evaluate");
  std::size_t correct = 0;
  for (const auto& seq : samples) {
    if (disc.forward(sequence_tensor(seq)) > 0.5) ++correct;
    const Tensor generated = gen.forward(context_tensor(seq, gen.config().k));
    if (disc.forward(sequence_tensor(seq, &generated)) < 0.5) ++correct;
  }
  return static_cast<double>(correct) / (2.0 * static_cast<double>(samples.size()));
}

void write_loss_trace(std::span<const double> trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "iter,loss\n" << std::setprecision(17);
  for (std::size_t i = 0; i < trace.size(); ++i) out << i << ',' << trace[i] << '\n';
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace lpvc
