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

#include "lpvc/losses.hpp"

#include <algorithm>
#include <cmath>

#include "lpvc/error.hpp"

namespace lpvc {

double lp_loss(const Tensor& x, const Tensor& y, int p, Tensor* grad_x) {
  if (!x.same_shape(y)) throw InvalidArgument("lp_loss shape mismatch: " + x.shape_string() + " vs " + y.shape_string());
  if (p != 1 && p != 2) throw InvalidArgument("lp_loss supports p = 1 or 2");
  const double n = static_cast<double>(x.size());
  if (grad_x) *grad_x = Tensor::zeros_like(x);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    if (p == 1) {
      sum += std::abs(d);
      if (grad_x) (*grad_x)[i] = (d > 0.0 ? 1.0 : d < 0.0 ? -1.0 : 0.0) / n;
    } else {
      sum += d * d;
      if (grad_x) (*grad_x)[i] = 2.0 * d / n;
    }
  }
  return sum / n;
}

double bce_loss(double x, double y, double* grad_x) {
  const double c = std::clamp(x, kBceEps, 1.0 - kBceEps);
  if (grad_x) *grad_x = -y / c + (1.0 - y) / (1.0 - c);
  return -y * std::log(c) - (1.0 - y) * std::log(1.0 - c);
}

double generator_loss(const Tensor& x, const Tensor& y, double x_disc, const LossWeights& weights, Tensor* grad_x,
                      double* grad_disc) {
  const double mse = lp_loss(x, y, 2, grad_x);
  if (grad_x) *grad_x *= weights.mse;
  // Only the lower clamp matters here: -log(x) is finite at x = 1.
  const double c = std::max(x_disc, kBceEps);
  if (grad_disc) *grad_disc = x_disc > kBceEps ? -weights.adv / c : 0.0;
  return weights.mse * mse - weights.adv * std::log(c);
}

}  // namespace lpvc
