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

#include <cstdint>
#include <string>
#include <vector>

#include "hemanet/gradcheck.hpp"
#include "hemanet/models.hpp"

namespace hemanet {

/// One architecture variant exercised by the randomized gradient checks.
struct GradCheckVariant {
  Family family = Family::Ffnn;
  SequenceMode elman_mode = SequenceMode::SingleStep;
  NarxMode narx_mode = NarxMode::PerRecord;

  /// "ffnn", "elman/single-step", "narx/stream", ...
  std::string name() const;
};

/// ffnn; elman in both sequence modes; narx in both modes.
std::vector<GradCheckVariant> all_gradcheck_variants();
std::vector<GradCheckVariant> gradcheck_variants(Family family);

struct GradCheckSummary {
  GradCheckVariant variant;
  std::size_t configurations = 0;
  std::size_t parameters = 0;
  double max_relative_error = 0.0;
  double max_absolute_error = 0.0;
};

/// Draws `configurations` random small networks (random widths, weights in
/// [-1, 1], random inputs and targets) and returns the worst relative error
/// between backprop and central differences.
GradCheckSummary run_gradcheck(const GradCheckVariant& variant, std::uint64_t seed,
                               std::size_t configurations = 20, double epsilon = 1e-5);

}  // namespace hemanet
