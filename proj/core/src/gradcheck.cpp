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

#include "hemanet/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hemanet/error.hpp"

namespace hemanet {

double relative_error(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), kGradientFloor});
  return std::abs(analytic - numeric) / scale;
}

GradCheckResult gradient_check(const std::vector<std::span<double>>& params,
                               const std::vector<std::span<const double>>& analytic,
                               const std::function<double()>& loss, double epsilon) {
  if (!(epsilon >= 1e-7 && epsilon <= 1e-3)) {
    throw std::invalid_argument("gradient check epsilon must be in [1e-7, 1e-3]");
  }
  if (params.size() != analytic.size()) throw DimensionError("parameter block count mismatch");

  GradCheckResult result;
  for (std::size_t b = 0; b < params.size(); ++b) {
    if (params[b].size() != analytic[b].size()) {
      throw DimensionError("parameter block size mismatch");
    }
    for (std::size_t i = 0; i < params[b].size(); ++i) {
      double& w = params[b][i];
      const double saved = w;
      w = saved + epsilon;
      const double plus = loss();
      w = saved - epsilon;
      const double minus = loss();
      w = saved;
      const double numeric = (plus - minus) / (2.0 * epsilon);
      const double err = relative_error(analytic[b][i], numeric);
      ++result.parameters;
      result.max_absolute_error =
          std::max(result.max_absolute_error, std::abs(analytic[b][i] - numeric));
      if (err > result.max_relative_error || result.parameters == 1) {
        result.max_relative_error = err;
        result.worst_block = b;
        result.worst_index = i;
        result.analytic = analytic[b][i];
        result.numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace hemanet
