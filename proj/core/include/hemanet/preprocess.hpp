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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hemanet/cbc.hpp"

namespace hemanet {

enum class Feature { Age, Gender, Rbc, Hgb, Hct, Mcv, Mch, Mchc, Wbc };

std::string_view feature_name(Feature feature);
std::optional<Feature> parse_feature(std::string_view name);

/// Ordered, duplicate-free selection of record fields fed to a network.
class FeatureSpec {
 public:
  /// Throws ValidationError on an empty list or duplicates.
  explicit FeatureSpec(std::vector<Feature> features);

  /// All nine inputs: age, gender, rbc, hgb, hct, mcv, mch, mchc, wbc.
  static FeatureSpec full9();
  /// The seven diagnosis inputs: age, gender, hgb, hct, mcv, mch, mchc.
  static FeatureSpec paper7();
  /// "full9" or "paper7". Throws ValidationError otherwise.
  static FeatureSpec preset(std::string_view name);
  static FeatureSpec from_names(const std::vector<std::string>& names);

  std::size_t size() const { return features_.size(); }
  const std::vector<Feature>& features() const { return features_; }
  std::vector<std::string> names() const;
  /// Preset name when the list matches one, else a comma-joined list.
  std::string label() const;

  bool operator==(const FeatureSpec&) const = default;

 private:
  std::vector<Feature> features_;
};

/// Raw feature vector in spec order; gender encodes male 0, female 1.
std::vector<double> encode(const CbcRecord& record, const FeatureSpec& spec);

/// Per-feature min-max map onto [-1, +1], fitted on training data.
class Normalizer {
 public:
  Normalizer() = default;
  /// Throws ValidationError when lengths differ or some min exceeds its max.
  Normalizer(std::vector<double> mins, std::vector<double> maxs);

  std::size_t size() const { return mins_.size(); }
  const std::vector<double>& mins() const { return mins_; }
  const std::vector<double>& maxs() const { return maxs_; }

  /// x -> 2 (x - min) / (max - min) - 1, unclamped. Constant features map
  /// to 0. Throws DimensionError on a length mismatch.
  std::vector<double> apply(std::span<const double> raw) const;
  /// Inverse of apply; constant features map back to their fitted value.
  std::vector<double> invert(std::span<const double> normalized) const;

  bool operator==(const Normalizer&) const = default;

 private:
  std::vector<double> mins_;
  std::vector<double> maxs_;
};

/// Throws ValidationError on empty input, DimensionError on ragged rows.
Normalizer fit_normalizer(std::span<const std::vector<double>> rows);

struct SplitFractions {
  double train = 0.4;
  double test = 0.4;
  double validation = 0.2;
};

/// Named split presets: "40-40-20" and "paper-materials" (147/230 train,
/// 83/230 test, no validation).
SplitFractions split_preset(std::string_view name);

struct DatasetSplit {
  std::vector<LabeledRecord> train;
  std::vector<LabeledRecord> test;
  std::vector<LabeledRecord> validation;
  SplitFractions fractions;
  std::uint64_t seed = 0;
};

/// Largest-remainder apportionment of `total` items over `weights` (which
/// must sum to 1). Ties in the remainder go to the lower index.
std::vector<std::size_t> apportion(std::size_t total, std::span<const double> weights);

/// Seeded shuffle-and-cut into train/test/validation.
///
/// Part sizes come from largest-remainder rounding of the overall count. In
/// stratified mode every class is spread over the parts so each cell is
/// within one record of its exact proportional share while the part totals
/// still match the unstratified sizes.
///
/// Fractions must be non-negative, sum to 1 within 1e-9, and the train and
/// test fractions must be positive. Throws ValidationError otherwise, or
/// when there are fewer records than non-empty parts.
DatasetSplit split_dataset(std::span<const LabeledRecord> data, const SplitFractions& fractions,
                           std::uint64_t seed, bool stratified = true);

}  // namespace hemanet
