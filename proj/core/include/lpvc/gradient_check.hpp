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
#include <functional>

#include "lpvc/networks.hpp"

namespace lpvc {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t coords_checked = 0;
};

/// Compares `analytic` against central finite differences of `loss` on
/// `samples` randomly chosen scalar coordinates of `weights`. `loss` must
/// read the parameters through `weights`, which is perturbed in place and
/// restored. Relative error is |a-n| / max(|a|, |n|, floor).
GradCheckResult gradient_check(Weights& weights, const Gradients& analytic, const std::function<double()>& loss,
                               std::size_t samples, std::uint64_t seed, double h = 1e-5, double floor = 1e-8);

}  // namespace lpvc
