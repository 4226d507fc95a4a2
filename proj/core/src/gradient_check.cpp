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

#include "lpvc/gradient_check.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lpvc/error.hpp"

namespace lpvc {

GradCheckResult gradient_check(Weights& weights, const Gradients& analytic, const std::function<double()>& loss,
                               std::size_t samples, std::uint64_t seed, double h, double floor) {
  if (analytic.size() != weights.params.size()) throw InvalidArgument("gradient_check: gradient count mismatch");
  const std::size_t total = weights.scalar_count();
  if (total == 0) return {};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, total - 1);

  GradCheckResult result;
  for (std::size_t s = 0; s < samples; ++s) {
    std::size_t flat = pick(rng);
    std::size_t p = 0;
    while (flat >= weights.params[p].value.size()) flat -= weights.params[p++].value.size();

    double& theta = weights.params[p].value[flat];
    const double saved = theta;
    theta = saved + h;
    const double up = loss();
    theta = saved - h;
    const double down = loss();
    theta = saved;

    const double numeric = (up - down) / (2.0 * h);
    const double a = analytic[p][flat];
    const double denom = std::max({std::abs(a), std::abs(numeric), floor});
    result.max_rel_error = std::max(result.max_rel_error, std::abs(a - numeric) / denom);
    ++result.coords_checked;
  }
  return result;
}

}  // namespace lpvc
