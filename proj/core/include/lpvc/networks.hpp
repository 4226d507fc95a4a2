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
#include <string>
#include <vector>

#include "lpvc/layers.hpp"
#include "lpvc/tensor.hpp"

namespace lpvc {

struct Parameter {
  std::string name;
  Tensor value;

  friend bool operator==(const Parameter&, const Parameter&) = default;
};

/// Learnable parameters in declaration order. Gradients are kept in a
/// parallel vector with the same order and shapes.
struct Weights {
  std::vector<Parameter> params;

  std::size_t scalar_count() const;
  friend bool operator==(const Weights&, const Weights&) = default;
};

using Gradients = std::vector<Tensor>;

/// Zero gradients shaped like `weights`.
Gradients zero_gradients(const Weights& weights);
void accumulate(Gradients& into, const Gradients& from);
void scale(Gradients& grads, double factor);

/// Generator hyperparameters. Defaults are the desk-scale configuration;
/// paper_scale() returns K=8, B=32, C=256.
struct NetConfig {
  int k = 4;         // input frames
  int blocks = 2;    // residual blocks
  int channels = 16;
  int kernel = 3;
  double res_scale = 0.1;

  static NetConfig paper_scale() { return {8, 32, 256, 3, 0.1}; }
  void validate() const;
  friend bool operator==(const NetConfig&, const NetConfig&) = default;
};

/// Uniform in +-1/sqrt(fan_in) for every kernel and bias.
enum class Init { kZeros, kUniformFanIn };

/// Fully convolutional next-frame predictor: input conv (K->C), B residual
/// blocks, a global skip from the input conv, then a linear output conv (C->1).
class Generator {
 public:
  struct Tape {
    Tensor input;
    Tensor head;  // input conv output
    std::vector<ResidualBlockTape> blocks;
    Tensor tail_input;  // head + body
  };

  Generator(NetConfig config, Init init, std::uint64_t seed = 0);
  Generator(NetConfig config, Weights weights);

  const NetConfig& config() const { return config_; }
  const Weights& weights() const { return weights_; }
  Weights& weights() { return weights_; }

  /// input (K,H,W) in [-1,1]; returns (1,H,W).
  Tensor forward(const Tensor& input, Tape* tape = nullptr) const;

  /// Parameter gradients for d(loss)/d(output) = grad_out. When grad_input
  /// is non-null it receives d(loss)/d(input).
  Gradients backward(const Tape& tape, const Tensor& grad_out, Tensor* grad_input = nullptr) const;

  static Weights make_weights(const NetConfig& config, Init init, std::uint64_t seed);

 private:
  ConvRef conv(std::size_t index) const {
    return {weights_.params[2 * index].value, weights_.params[2 * index + 1].value};
  }

  NetConfig config_;
  Weights weights_;
};

/// Discriminator hyperparameters: three unpadded convs with leaky ReLU and
/// 2x2 average pooling after the first two, sigmoid on the last.
struct DiscConfig {
  int in_channels = 9;
  int depth1 = 32;
  int depth2 = 64;
  int kernel = 7;
  int input_size = 48;  // must reduce to a 1x1 score

  void validate() const;
  friend bool operator==(const DiscConfig&, const DiscConfig&) = default;
};

class Discriminator {
 public:
  struct Tape {
    Tensor input;
    Tensor pre1, act1;  // conv1 output, leaky output
    Tensor pool1;
    Tensor pre2, act2;
    Tensor pool2;
    double logit = 0.0;
  };

  Discriminator(DiscConfig config, Init init, std::uint64_t seed = 0);
  Discriminator(DiscConfig config, Weights weights);

  const DiscConfig& config() const { return config_; }
  const Weights& weights() const { return weights_; }
  Weights& weights() { return weights_; }

  /// input (in_channels, input_size, input_size); returns a score in (0,1).
  double forward(const Tensor& input, Tape* tape = nullptr) const;

  /// grad_score = d(loss)/d(score).
  Gradients backward(const Tape& tape, double grad_score, Tensor* grad_input = nullptr) const;

  static Weights make_weights(const DiscConfig& config, Init init, std::uint64_t seed);

 private:
  ConvRef conv(std::size_t index) const {
    return {weights_.params[2 * index].value, weights_.params[2 * index + 1].value};
  }

  DiscConfig config_;
  Weights weights_;
};

}  // namespace lpvc
