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

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hemanet/error.hpp"

namespace hemanet {

enum class Gender { Male, Female };

/// Ground-truth or predicted outcome. The numeric values double as class
/// indices in confusion matrices and one-hot encodings.
enum class AnemiaLabel { NonAnemic = 0, Microcytic = 1, Normocytic = 2, Macrocytic = 3 };

inline constexpr std::array<AnemiaLabel, 4> kAllLabels = {
    AnemiaLabel::NonAnemic, AnemiaLabel::Microcytic, AnemiaLabel::Normocytic,
    AnemiaLabel::Macrocytic};

inline constexpr std::array<AnemiaLabel, 3> kAnemiaSubtypes = {
    AnemiaLabel::Microcytic, AnemiaLabel::Normocytic, AnemiaLabel::Macrocytic};

constexpr int label_index(AnemiaLabel label) { return static_cast<int>(label); }
constexpr bool is_anemic(AnemiaLabel label) { return label != AnemiaLabel::NonAnemic; }
/// Diagnosis-stage target: 0 healthy, 1 anemic.
constexpr int diagnosis_of(AnemiaLabel label) { return is_anemic(label) ? 1 : 0; }

/// Canonical lower-case token: non_anemic, microcytic, normocytic, macrocytic.
std::string_view label_token(AnemiaLabel label);
/// Case-insensitive inverse of label_token; nullopt for unknown tokens.
std::optional<AnemiaLabel> parse_label(std::string_view token);

std::string_view gender_token(Gender gender);
std::optional<Gender> parse_gender(std::string_view token);

/// One patient's complete blood count plus demographics.
///
/// Units: rbc 10^6 cells/uL, hgb g/dL, hct percent, mcv fL, mch pg,
/// mchc g/dL, wbc 10^3 cells/uL.
struct CbcRecord {
  int age = 40;
  Gender gender = Gender::Male;
  double rbc = 4.8;
  double hgb = 14.0;
  double hct = 42.0;
  double mcv = 88.0;
  double mch = 29.5;
  double mchc = 33.5;
  double wbc = 7.0;

  bool operator==(const CbcRecord&) const = default;
};

struct LabeledRecord {
  CbcRecord record;
  AnemiaLabel label = AnemiaLabel::NonAnemic;

  bool operator==(const LabeledRecord&) const = default;
};

struct Interval {
  double low;
  double high;
};

/// Plausibility bounds used to reject absurd measurements.
struct PlausibilityBounds {
  Interval rbc{1.0, 8.0};
  Interval hgb{3.0, 22.0};
  Interval mcv{50.0, 150.0};
  Interval mch{15.0, 45.0};
  Interval mchc{25.0, 42.0};
  Interval wbc{1.0, 50.0};
};

struct Violation {
  std::string field;
  std::string message;
};

/// Every violated bound, in field order. Empty means the record is valid.
std::vector<Violation> validate_record(const CbcRecord& record,
                                       const PlausibilityBounds& bounds = {});

/// Joins violations as "field: message; field: message".
std::string describe(const std::vector<Violation>& violations);

/// Clinical reference ranges that drive the rule oracle.
struct ReferenceRanges {
  double hgb_low_male = 13.0;
  double hgb_low_female = 12.0;
  double mcv_low = 80.0;
  double mcv_high = 100.0;
  double mch_low = 27.0;
  double mch_high = 33.0;
  double mchc_low = 32.0;
  double mchc_high = 36.0;

  double hgb_threshold(Gender gender) const {
    return gender == Gender::Male ? hgb_low_male : hgb_low_female;
  }

  /// Throws ValidationError when a bound is non-positive or a low is not
  /// strictly below its high.
  void validate() const;

  bool operator==(const ReferenceRanges&) const = default;
};

/// Parses a JSON object with any subset of the ReferenceRanges field names;
/// absent fields keep their defaults. Throws DataError on malformed input.
ReferenceRanges ranges_from_json(std::string_view text);
ReferenceRanges load_ranges(const std::string& path);
std::string ranges_to_json(const ReferenceRanges& ranges);

/// How rule_label handles anemic records whose three red-cell indices do not
/// agree with one another.
enum class MixedIndexPolicy {
  McvDecides,  // fall back to MCV alone
  Strict,      // throw UnclassifiableError
};

class UnclassifiableError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Labels a record from the reference ranges.
///
/// Non-anemic iff hgb is at or above the gender threshold. Anemic records are
/// microcytic when MCV, MCH and MCHC are all below range, macrocytic when all
/// are above, normocytic when all are inside; mixed patterns follow `policy`.
/// Throws ValidationError naming the offending fields for invalid records.
AnemiaLabel rule_label(const CbcRecord& record, const ReferenceRanges& ranges = {},
                       MixedIndexPolicy policy = MixedIndexPolicy::McvDecides);

}  // namespace hemanet
