// Copyright 2026 The HemaNet Authors.
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

#include <functional>
#include <span>
#include <vector>

#include "hemanet/nn.hpp"

namespace hemanet {

struct GradCheckResult {
  double max_relative_error = 0.0;
  double max_absolute_error = 0.0;
  std::size_t parameters = 0;
  std::size_t worst_block = 0;
  std::size_t worst_index = 0;
  double analytic = 0.0;  // at the worst parameter
  double numeric = 0.0;
};

/// Gradients smaller than this are compared on an absolute scale. With
/// double-precision losses and eps = 1e-5 the central difference carries
/// roughly 1e-11 of rounding noise, so relative errors below 1e-4 are only
/// resolvable for gradients of at least 1e-7.
inline constexpr double kGradientFloor = 1e-7;

/// |a - n| / max(|a|, |n|, kGradientFloor)
double relative_error(double analytic, double numeric);

/// Central differences (L(w + eps) - L(w - eps)) / 2 eps for every parameter,
/// compared against `analytic`. Each parameter is restored after probing.
/// Throws std::invalid_argument unless eps is in [1e-7, 1e-3].
GradCheckResult gradient_check(const std::vector<std::span<double>>& params,
                               const std::vector<std::span<const double>>& analytic,
                               const std::function<double()>& loss, double epsilon);

template <TrainableModel Model>
GradCheckResult gradient_check(const Model& model, const Example& example,
                               double epsilon = 1e-5) {
  const auto g = model.gradient(example);
  Model probe = model;
  return gradient_check(probe.parameter_blocks(), g.gradients.parameter_blocks(),
                        [&] { return probe.loss(example); }, epsilon);
}

}  // namespace hemanet
