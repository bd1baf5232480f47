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
#include <map>
#include <vector>

#include "hemanet/cbc.hpp"

namespace hemanet {

using ClassCounts = std::map<AnemiaLabel, long long>;

struct SynthOptions {
  ReferenceRanges ranges;
  std::uint64_t seed = 0;
  /// Fraction of each sampling window kept clear on either side of a
  /// reference threshold. Zero samples right up to the thresholds.
  double margin = 0.05;
};

/// Generates `n` records with exactly the requested count per class.
///
/// Red-cell indices are drawn per class, then RBC and HCT are derived so the
/// panel is arithmetically consistent (MCV = 10 HCT/RBC, MCH = 10 HGB/RBC,
/// MCHC = 100 HGB/HCT up to 6-digit rounding). Every emitted label equals
/// rule_label() of its record under the given ranges in both the MCV-fallback
/// and strict policies. Output order is shuffled; fully determined by the
/// seed. Throws ValidationError when counts are negative or do not sum to n.
std::vector<LabeledRecord> synth_generate(long long n, const ClassCounts& counts,
                                          const SynthOptions& options = {});

/// Class composition of the published training set: 26 microcytic,
/// 40 normocytic, 39 macrocytic, 42 non-anemic.
ClassCounts reference_training_mix();

/// Scales reference_training_mix() to `total` records by largest remainder.
ClassCounts scaled_reference_mix(long long total);

}  // namespace hemanet
