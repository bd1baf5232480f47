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

#include "hemanet/preprocess.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <numeric>

#include "hemanet/error.hpp"
#include "hemanet/random.hpp"

namespace hemanet {

namespace {

constexpr std::array<Feature, 9> kAllFeatures = {Feature::Age, Feature::Gender, Feature::Rbc,
                                                 Feature::Hgb, Feature::Hct,    Feature::Mcv,
                                                 Feature::Mch, Feature::Mchc,   Feature::Wbc};

double feature_value(const CbcRecord& r, Feature f) {
  switch (f) {
    case Feature::Age: return static_cast<double>(r.age);
    case Feature::Gender: return r.gender == Gender::Male ? 0.0 : 1.0;
    case Feature::Rbc: return r.rbc;
    case Feature::Hgb: return r.hgb;
    case Feature::Hct: return r.hct;
    case Feature::Mcv: return r.mcv;
    case Feature::Mch: return r.mch;
    case Feature::Mchc: return r.mchc;
    case Feature::Wbc: return r.wbc;
  }
  return 0.0;
}

// Spreads each class's leftover records (after flooring its exact shares)
// over the parts so that every cell gets at most one extra record and every
// part reaches its target size. Cells with the largest fractional share are
// filled first; remaining demand is routed along augmenting paths.
std::vector<std::vector<std::size_t>> controlled_rounding(
    const std::vector<std::size_t>& class_sizes, std::span<const double> fractions,
    const std::vector<std::size_t>& part_sizes) {
  const std::size_t classes = class_sizes.size();
  const std::size_t parts = fractions.size();
  std::vector<std::vector<std::size_t>> cells(classes, std::vector<std::size_t>(parts, 0));
  std::vector<std::vector<double>> remainder(classes, std::vector<double>(parts, 0.0));
  std::vector<std::vector<bool>> bumped(classes, std::vector<bool>(parts, false));
  std::vector<long long> class_need(classes, 0);
  std::vector<long long> part_need(part_sizes.begin(), part_sizes.end());

  for (std::size_t c = 0; c < classes; ++c) {
    std::size_t used = 0;
    for (std::size_t i = 0; i < parts; ++i) {
      const double exact = static_cast<double>(class_sizes[c]) * fractions[i];
      const auto base = static_cast<std::size_t>(std::floor(exact + 1e-9));
      cells[c][i] = base;
      remainder[c][i] = std::max(0.0, exact - static_cast<double>(base));
      used += base;
      part_need[i] -= static_cast<long long>(base);
    }
    class_need[c] = static_cast<long long>(class_sizes[c]) - static_cast<long long>(used);
  }

  auto eligible = [&](std::size_t c, std::size_t i) {
    return fractions[i] > 0.0 && !bumped[c][i];
  };

  struct Cell {
    std::size_t c, i;
    double r;
  };
  std::vector<Cell> order;
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t i = 0; i < parts; ++i) order.push_back({c, i, remainder[c][i]});
  }
  std::stable_sort(order.begin(), order.end(),
                   [](const Cell& a, const Cell& b) { return a.r > b.r; });
  for (const auto& cell : order) {
    if (class_need[cell.c] > 0 && part_need[cell.i] > 0 && eligible(cell.c, cell.i)) {
      bumped[cell.c][cell.i] = true;
      --class_need[cell.c];
      --part_need[cell.i];
    }
  }

  // Augmenting paths: class -> (unbumped cell) -> part -> (bumped cell) -> class ...
  for (std::size_t start = 0; start < classes; ++start) {
    while (class_need[start] > 0) {
      std::vector<long long> class_parent(classes, -2);  // part that led here
      std::vector<long long> part_parent(parts, -1);     // class that led here
      std::deque<std::size_t> queue{start};
      class_parent[start] = -1;
      long long found = -1;
      while (!queue.empty() && found < 0) {
        const auto c = queue.front();
        queue.pop_front();
        for (std::size_t i = 0; i < parts && found < 0; ++i) {
          if (!eligible(c, i) || part_parent[i] >= 0) continue;
          part_parent[i] = static_cast<long long>(c);
          if (part_need[i] > 0) {
            found = static_cast<long long>(i);
            break;
          }
          for (std::size_t c2 = 0; c2 < classes; ++c2) {
            if (bumped[c2][i] && class_parent[c2] == -2) {
              class_parent[c2] = static_cast<long long>(i);
              queue.push_back(c2);
            }
          }
        }
      }
      if (found < 0) break;
      auto i = static_cast<std::size_t>(found);
      --part_need[i];
      --class_need[start];
      while (true) {
        const auto c = static_cast<std::size_t>(part_parent[i]);
        bumped[c][i] = true;
        if (class_parent[c] < 0) break;
        const auto prev = static_cast<std::size_t>(class_parent[c]);
        bumped[c][prev] = false;
        i = prev;
      }
    }
  }

  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t i = 0; i < parts; ++i) {
      if (bumped[c][i]) ++cells[c][i];
    }
    // Unreachable for consistent inputs; keeps the result a partition.
    for (std::size_t i = 0; class_need[c] > 0 && i < parts; ++i) {
      while (class_need[c] > 0 && part_need[i] > 0 && fractions[i] > 0.0) {
        ++cells[c][i];
        --class_need[c];
        --part_need[i];
      }
    }
  }
  return cells;
}

}  // namespace

std::string_view feature_name(Feature feature) {
  switch (feature) {
    case Feature::Age: return "age";
    case Feature::Gender: return "gender";
    case Feature::Rbc: return "rbc";
    case Feature::Hgb: return "hgb";
    case Feature::Hct: return "hct";
    case Feature::Mcv: return "mcv";
    case Feature::Mch: return "mch";
    case Feature::Mchc: return "mchc";
    case Feature::Wbc: return "wbc";
  }
  return "unknown";
}

std::optional<Feature> parse_feature(std::string_view name) {
  for (const auto f : kAllFeatures) {
    if (feature_name(f) == name) return f;
  }
  return std::nullopt;
}

FeatureSpec::FeatureSpec(std::vector<Feature> features) : features_(std::move(features)) {
  if (features_.empty()) throw ValidationError("feature spec is empty");
  for (std::size_t i = 0; i < features_.size(); ++i) {
    for (std::size_t j = i + 1; j < features_.size(); ++j) {
      if (features_[i] == features_[j]) {
        throw ValidationError("duplicate feature: " + std::string(feature_name(features_[i])));
      }
    }
  }
}

FeatureSpec FeatureSpec::full9() {
  return FeatureSpec({kAllFeatures.begin(), kAllFeatures.end()});
}

FeatureSpec FeatureSpec::paper7() {
  return FeatureSpec({Feature::Age, Feature::Gender, Feature::Hgb, Feature::Hct, Feature::Mcv,
                      Feature::Mch, Feature::Mchc});
}

FeatureSpec FeatureSpec::preset(std::string_view name) {
  if (name == "full9") return full9();
  if (name == "paper7") return paper7();
  throw ValidationError("unknown feature preset: " + std::string(name));
}

FeatureSpec FeatureSpec::from_names(const std::vector<std::string>& names) {
  std::vector<Feature> features;
  for (const auto& n : names) {
    const auto f = parse_feature(n);
    if (!f) throw ValidationError("unknown feature: " + n);
    features.push_back(*f);
  }
  return FeatureSpec(std::move(features));
}

std::vector<std::string> FeatureSpec::names() const {
  std::vector<std::string> out;
  for (const auto f : features_) out.emplace_back(feature_name(f));
  return out;
}

std::string FeatureSpec::label() const {
  if (*this == full9()) return "full9";
  if (*this == paper7()) return "paper7";
  std::string out;
  for (const auto& n : names()) out += (out.empty() ? "" : ",") + n;
  return out;
}

std::vector<double> encode(const CbcRecord& record, const FeatureSpec& spec) {
  std::vector<double> out;
  out.reserve(spec.size());
  for (const auto f : spec.features()) out.push_back(feature_value(record, f));
  return out;
}

Normalizer::Normalizer(std::vector<double> mins, std::vector<double> maxs)
    : mins_(std::move(mins)), maxs_(std::move(maxs)) {
  if (mins_.size() != maxs_.size()) throw ValidationError("normalizer min/max length mismatch");
  for (std::size_t i = 0; i < mins_.size(); ++i) {
    if (!std::isfinite(mins_[i]) || !std::isfinite(maxs_[i]) || mins_[i] > maxs_[i]) {
      throw ValidationError("normalizer feature " + std::to_string(i) +
                            " has min > max or non-finite bounds");
    }
  }
}

std::vector<double> Normalizer::apply(std::span<const double> raw) const {
  if (raw.size() != size()) {
    throw DimensionError("normalizer expects " + std::to_string(size()) + " features, got " +
                         std::to_string(raw.size()));
  }
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double span = maxs_[i] - mins_[i];
    out[i] = span > 0.0 ? 2.0 * (raw[i] - mins_[i]) / span - 1.0 : 0.0;
  }
  return out;
}

std::vector<double> Normalizer::invert(std::span<const double> normalized) const {
  if (normalized.size() != size()) {
    throw DimensionError("normalizer expects " + std::to_string(size()) + " features, got " +
                         std::to_string(normalized.size()));
  }
  std::vector<double> out(normalized.size());
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    const double span = maxs_[i] - mins_[i];
    out[i] = span > 0.0 ? (normalized[i] + 1.0) * 0.5 * span + mins_[i] : mins_[i];
  }
  return out;
}

Normalizer fit_normalizer(std::span<const std::vector<double>> rows) {
  if (rows.empty()) throw ValidationError("cannot fit a normalizer on empty data");
  std::vector<double> mins = rows.front();
  std::vector<double> maxs = rows.front();
  for (const auto& row : rows) {
    if (row.size() != mins.size()) throw DimensionError("ragged rows in normalizer fit");
    for (std::size_t i = 0; i < row.size(); ++i) {
      mins[i] = std::min(mins[i], row[i]);
      maxs[i] = std::max(maxs[i], row[i]);
    }
  }
  return Normalizer(std::move(mins), std::move(maxs));
}

SplitFractions split_preset(std::string_view name) {
  if (name == "40-40-20") return {0.4, 0.4, 0.2};
  if (name == "paper-materials") return {147.0 / 230.0, 83.0 / 230.0, 0.0};
  throw ValidationError("unknown split preset: " + std::string(name));
}

std::vector<std::size_t> apportion(std::size_t total, std::span<const double> weights) {
  std::vector<std::size_t> sizes(weights.size(), 0);
  std::vector<double> remainders(weights.size(), 0.0);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = static_cast<double>(total) * weights[i];
    sizes[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    remainders[i] = exact - static_cast<double>(sizes[i]);
    assigned += sizes[i];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
  for (std::size_t k = 0; assigned < total; k = (k + 1) % order.size()) {
    if (weights[order[k]] > 0.0) {
      ++sizes[order[k]];
      ++assigned;
    }
  }
  return sizes;
}

DatasetSplit split_dataset(std::span<const LabeledRecord> data, const SplitFractions& fractions,
                           std::uint64_t seed, bool stratified) {
  const std::array<double, 3> f = {fractions.train, fractions.test, fractions.validation};
  for (const double v : f) {
    if (!std::isfinite(v) || v < 0.0) throw ValidationError("split fractions must be >= 0");
  }
  if (fractions.train <= 0.0 || fractions.test <= 0.0) {
    throw ValidationError("train and test fractions must be positive");
  }
  if (std::abs(f[0] + f[1] + f[2] - 1.0) > 1e-9) {
    throw ValidationError("split fractions must sum to 1");
  }
  const auto nonempty = static_cast<std::size_t>(std::count_if(
      f.begin(), f.end(), [](double v) { return v > 0.0; }));
  if (data.size() < nonempty) {
    throw ValidationError("need at least " + std::to_string(nonempty) + " records to split, got " +
                          std::to_string(data.size()));
  }

  Rng rng(seed);
  const auto sizes = apportion(data.size(), f);
  std::array<std::vector<std::size_t>, 3> members;

  if (!stratified) {
    std::vector<std::size_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(idx);
    std::size_t pos = 0;
    for (std::size_t p = 0; p < 3; ++p) {
      members[p].assign(idx.begin() + static_cast<long>(pos),
                        idx.begin() + static_cast<long>(pos + sizes[p]));
      pos += sizes[p];
    }
  } else {
    std::vector<std::vector<std::size_t>> groups(kAllLabels.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      groups[label_index(data[i].label)].push_back(i);
    }
    std::vector<std::size_t> class_sizes;
    for (auto& g : groups) {
      rng.shuffle(g);
      class_sizes.push_back(g.size());
    }
    const auto cells = controlled_rounding(class_sizes, f, sizes);
    for (std::size_t c = 0; c < groups.size(); ++c) {
      std::size_t pos = 0;
      for (std::size_t p = 0; p < 3; ++p) {
        for (std::size_t k = 0; k < cells[c][p]; ++k) members[p].push_back(groups[c][pos++]);
      }
    }
    for (auto& m : members) rng.shuffle(m);
  }

  DatasetSplit split;
  split.fractions = fractions;
  split.seed = seed;
  std::array<std::vector<LabeledRecord>*, 3> parts = {&split.train, &split.test,
                                                      &split.validation};
  for (std::size_t p = 0; p < 3; ++p) {
    for (const auto i : members[p]) parts[p]->push_back(data[i]);
  }
  return split;
}

}  // namespace hemanet
