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

/// (1/N) * sum |y_i - x_i|^p for p in {1, 2}. When grad_x is non-null it
/// receives d(loss)/dx; the l1 subgradient at x == y is 0.
double lp_loss(const Tensor& x, const Tensor& y, int p, Tensor* grad_x = nullptr);

/// Discriminator scores are clamped to [kBceEps, 1 - kBceEps] before the log.
inline constexpr double kBceEps = 1e-7;

/// -y*log(x) - (1-y)*log(1-x).
double bce_loss(double x, double y, double* grad_x = nullptr);

struct LossWeights {
  double mse = 0.95;
  double adv = 0.05;
};

/// weights.mse * MSE(x, y) - weights.adv * log(max(x_disc, kBceEps)).
double generator_loss(const Tensor& x, const Tensor& y, double x_disc, const LossWeights& weights,
                      Tensor* grad_x = nullptr, double* grad_disc = nullptr);

}  // namespace lpvc
