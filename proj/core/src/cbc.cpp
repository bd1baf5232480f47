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

#include "hemanet/cbc.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hemanet {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string format_bound(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void check_analyte(std::vector<Violation>& out, const char* field, double value,
                   const Interval& plausible) {
  if (!std::isfinite(value)) {
    out.push_back({field, std::string(field) + " must be finite"});
    return;
  }
  if (value <= 0.0) out.push_back({field, std::string(field) + " must be positive"});
  if (value < plausible.low || value > plausible.high) {
    out.push_back({field, std::string(field) + " out of plausible range [" +
                              format_bound(plausible.low) + ", " +
                              format_bound(plausible.high) + "]"});
  }
}

enum class Level { Low, Within, High };

Level level(double value, double low, double high) {
  if (value < low) return Level::Low;
  if (value > high) return Level::High;
  return Level::Within;
}

}  // namespace

std::string_view label_token(AnemiaLabel label) {
  switch (label) {
    case AnemiaLabel::NonAnemic: return "non_anemic";
    case AnemiaLabel::Microcytic: return "microcytic";
    case AnemiaLabel::Normocytic: return "normocytic";
    case AnemiaLabel::Macrocytic: return "macrocytic";
  }
  return "unknown";
}

std::optional<AnemiaLabel> parse_label(std::string_view token) {
  const auto t = lower(token);
  for (const auto label : kAllLabels) {
    if (t == label_token(label)) return label;
  }
  return std::nullopt;
}

std::string_view gender_token(Gender gender) {
  return gender == Gender::Male ? "male" : "female";
}

std::optional<Gender> parse_gender(std::string_view token) {
  const auto t = lower(token);
  if (t == "male") return Gender::Male;
  if (t == "female") return Gender::Female;
  return std::nullopt;
}

std::vector<Violation> validate_record(const CbcRecord& r, const PlausibilityBounds& bounds) {
  std::vector<Violation> out;
  if (r.age < 0 || r.age > 120) out.push_back({"age", "age out of [0, 120]"});
  if (r.gender != Gender::Male && r.gender != Gender::Female) {
    out.push_back({"gender", "gender must be male or female"});
  }
  check_analyte(out, "rbc", r.rbc, bounds.rbc);
  check_analyte(out, "hgb", r.hgb, bounds.hgb);
  if (!std::isfinite(r.hct)) {
    out.push_back({"hct", "hct must be finite"});
  } else if (r.hct <= 0.0 || r.hct >= 100.0) {
    out.push_back({"hct", "hct out of (0,100)"});
  }
  check_analyte(out, "mcv", r.mcv, bounds.mcv);
  check_analyte(out, "mch", r.mch, bounds.mch);
  check_analyte(out, "mchc", r.mchc, bounds.mchc);
  check_analyte(out, "wbc", r.wbc, bounds.wbc);
  return out;
}

std::string describe(const std::vector<Violation>& violations) {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v.field + ": " + v.message;
  }
  return out;
}

void ReferenceRanges::validate() const {
  const std::pair<const char*, double> values[] = {
      {"hgb_low_male", hgb_low_male}, {"hgb_low_female", hgb_low_female},
      {"mcv_low", mcv_low},           {"mcv_high", mcv_high},
      {"mch_low", mch_low},           {"mch_high", mch_high},
      {"mchc_low", mchc_low},         {"mchc_high", mchc_high}};
  for (const auto& [name, v] : values) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw ValidationError(std::string("reference range ") + name + " must be positive");
    }
  }
  if (!(mcv_low < mcv_high)) throw ValidationError("reference range mcv_low must be < mcv_high");
  if (!(mch_low < mch_high)) throw ValidationError("reference range mch_low must be < mch_high");
  if (!(mchc_low < mchc_high)) {
    throw ValidationError("reference range mchc_low must be < mchc_high");
  }
}

ReferenceRanges ranges_from_json(std::string_view text) {
  ReferenceRanges r;
  try {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_object()) throw DataError("reference ranges must be a JSON object");
    const std::pair<const char*, double*> fields[] = {
        {"hgb_low_male", &r.hgb_low_male}, {"hgb_low_female", &r.hgb_low_female},
        {"mcv_low", &r.mcv_low},           {"mcv_high", &r.mcv_high},
        {"mch_low", &r.mch_low},           {"mch_high", &r.mch_high},
        {"mchc_low", &r.mchc_low},         {"mchc_high", &r.mchc_high}};
    for (const auto& [key, value] : j.items()) {
      const auto it = std::find_if(std::begin(fields), std::end(fields),
                                   [&](const auto& f) { return key == f.first; });
      if (it == std::end(fields)) throw DataError("unknown reference range field: " + key);
      if (!value.is_number()) throw DataError("reference range " + key + " must be a number");
      *it->second = value.get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed reference ranges: ") + e.what());
  }
  try {
    r.validate();
  } catch (const ValidationError& e) {
    throw DataError(e.what());
  }
  return r;
}

ReferenceRanges load_ranges(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open reference ranges file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ranges_from_json(ss.str());
}

std::string ranges_to_json(const ReferenceRanges& r) {
  nlohmann::ordered_json j;
  j["hgb_low_male"] = r.hgb_low_male;
  j["hgb_low_female"] = r.hgb_low_female;
  j["mcv_low"] = r.mcv_low;
  j["mcv_high"] = r.mcv_high;
  j["mch_low"] = r.mch_low;
  j["mch_high"] = r.mch_high;
  j["mchc_low"] = r.mchc_low;
  j["mchc_high"] = r.mchc_high;
  return j.dump(2);
}

AnemiaLabel rule_label(const CbcRecord& record, const ReferenceRanges& ranges,
                       MixedIndexPolicy policy) {
  if (const auto violations = validate_record(record); !violations.empty()) {
    throw ValidationError("invalid record: " + describe(violations));
  }
  if (record.hgb >= ranges.hgb_threshold(record.gender)) return AnemiaLabel::NonAnemic;

  const Level mcv = level(record.mcv, ranges.mcv_low, ranges.mcv_high);
  const Level mch = level(record.mch, ranges.mch_low, ranges.mch_high);
  const Level mchc = level(record.mchc, ranges.mchc_low, ranges.mchc_high);

  if (mcv == mch && mch == mchc) {
    switch (mcv) {
      case Level::Low: return AnemiaLabel::Microcytic;
      case Level::High: return AnemiaLabel::Macrocytic;
      case Level::Within: return AnemiaLabel::Normocytic;
    }
  }
  if (policy == MixedIndexPolicy::Strict) {
    throw UnclassifiableError("red-cell indices disagree (MCV, MCH, MCHC not uniformly "
                              "low, high or within range)");
  }
  switch (mcv) {
    case Level::Low: return AnemiaLabel::Microcytic;
    case Level::High: return AnemiaLabel::Macrocytic;
    case Level::Within: break;
  }
  return AnemiaLabel::Normocytic;
}

}  // namespace hemanet
