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

#include "lpvc/tensor.hpp"

namespace lpvc {

/// Cross-correlation with zero padding. input (C,H,W), kernel (O,C,k,k),
/// bias (O). Output is (O, H+2p-k+1, W+2p-k+1).
Tensor conv2d(const Tensor& input, const Tensor& kernel, const Tensor& bias, int padding);

struct Conv2dGrads {
  Tensor input;
  Tensor kernel;
  Tensor bias;
};

Conv2dGrads conv2d_backward(const Tensor& input, const Tensor& kernel, int padding, const Tensor& grad_out);

enum class Activation { kRelu, kLeakyRelu, kSigmoid };

inline constexpr double kLeakySlope = 0.2;

Tensor activate(const Tensor& x, Activation kind);
double activate(double x, Activation kind);

/// Gradient w.r.t. the pre-activation `x`. relu'(0) is taken as 0.
Tensor activate_backward(const Tensor& x, Activation kind, const Tensor& grad_out);

/// 2x2 average pooling, stride 2; trailing odd rows/columns are dropped.
Tensor avg_pool2(const Tensor& x);
Tensor avg_pool2_backward(const Tensor& input, const Tensor& grad_out);

/// Parameters of one conv layer.
struct ConvRef {
  const Tensor& weight;
  const Tensor& bias;
};

struct ResidualBlockTape {
  Tensor input;
  Tensor hidden;  // conv1 output, before ReLU
  Tensor relu;
};

/// y = x + scale * conv2(relu(conv1(x))), same-size padding.
Tensor residual_block(const Tensor& x, ConvRef conv1, ConvRef conv2, double scale, ResidualBlockTape* tape = nullptr);

struct ResidualBlockGrads {
  Tensor input;
  Conv2dGrads conv1;
  Conv2dGrads conv2;
};

ResidualBlockGrads residual_block_backward(const ResidualBlockTape& tape, ConvRef conv1, ConvRef conv2, double scale,
                                           const Tensor& grad_out);

}  // namespace lpvc
