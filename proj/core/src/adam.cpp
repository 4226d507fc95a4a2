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

#include "lpvc/adam.hpp"

#include <cmath>

#include "lpvc/error.hpp"

namespace lpvc {

Adam::Adam(const Weights& weights, AdamConfig config)
    : config_(config), m_(zero_gradients(weights)), v_(zero_gradients(weights)) {}

void Adam::step(Weights& weights, const Gradients& grads) {
  if (grads.size() != weights.params.size() || m_.size() != weights.params.size())
    throw InvalidArgument("Adam: gradient count does not match parameters");
  for (std::size_t i = 0; i < grads.size(); ++i)
    if (!grads[i].same_shape(weights.params[i].value))
      throw InvalidArgument("Adam: gradient shape mismatch for " + weights.params[i].name);

  ++steps_;
  const double t = static_cast<double>(steps_);
  const double c1 = 1.0 - std::pow(config_.beta1, t);
  const double c2 = 1.0 - std::pow(config_.beta2, t);
  for (std::size_t i = 0; i < grads.size(); ++i) {
    auto theta = weights.params[i].value.data();
    const auto g = grads[i].data();
    auto m = m_[i].data();
    auto v = v_[i].data();
    for (std::size_t j = 0; j < g.size(); ++j) {
      m[j] = config_.beta1 * m[j] + (1.0 - config_.beta1) * g[j];
      v[j] = config_.beta2 * v[j] + (1.0 - config_.beta2) * g[j] * g[j];
      const double m_hat = m[j] / c1;
      const double v_hat = v[j] / c2;
      theta[j] -= config_.lr * m_hat / (std::sqrt(v_hat) + config_.eps);
    }
  }
}

}  // namespace lpvc
