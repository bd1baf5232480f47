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

#include "hemanet/synth.hpp"

#include <algorithm>
#include <array>

#include "hemanet/csv.hpp"
#include "hemanet/preprocess.hpp"
#include "hemanet/random.hpp"

namespace hemanet {

namespace {

constexpr int kMaxAttempts = 100000;

struct Window {
  double low;
  double high;

  // Interior of the window with `margin` of its width trimmed from each end.
  Window shrink(double margin) const {
    const double d = margin * (high - low);
    return {low + d, high - d};
  }
  bool contains(double v) const { return v >= low && v <= high; }
  double sample(Rng& rng) const { return rng.uniform(low, high); }
};

Window clamp(Window w, const Interval& plausible) {
  return {std::max(w.low, plausible.low), std::min(w.high, plausible.high)};
}

// Sampling window for one red-cell index: below, inside or above its
// reference interval. Out-of-range windows extend 1.5 interval widths.
Window index_window(double ref_low, double ref_high, AnemiaLabel subtype,
                    const Interval& plausible) {
  const double width = ref_high - ref_low;
  switch (subtype) {
    case AnemiaLabel::Microcytic: return clamp({ref_low - 1.5 * width, ref_low}, plausible);
    case AnemiaLabel::Macrocytic: return clamp({ref_high, ref_high + 1.5 * width}, plausible);
    default: return {ref_low, ref_high};
  }
}

class Sampler {
 public:
  Sampler(const SynthOptions& options) : options_(options), rng_(options.seed) {}

  std::vector<AnemiaLabel> shuffled_labels(const ClassCounts& counts) {
    std::vector<AnemiaLabel> labels;
    for (const auto label : kAllLabels) {
      const auto it = counts.find(label);
      if (it == counts.end()) continue;
      labels.insert(labels.end(), static_cast<std::size_t>(it->second), label);
    }
    rng_.shuffle(labels);
    return labels;
  }

  CbcRecord draw(AnemiaLabel label) {
    const auto& ranges = options_.ranges;
    const PlausibilityBounds bounds;
    // Healthy records get normal indices; anemic ones the subtype's windows.
    const AnemiaLabel shape = is_anemic(label) ? label : AnemiaLabel::Normocytic;
    const Window mch = index_window(ranges.mch_low, ranges.mch_high, shape, bounds.mch)
                           .shrink(options_.margin);
    const Window mchc = index_window(ranges.mchc_low, ranges.mchc_high, shape, bounds.mchc)
                            .shrink(options_.margin);
    const Window mcv = index_window(ranges.mcv_low, ranges.mcv_high, shape, bounds.mcv)
                           .shrink(options_.margin);

    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      CbcRecord r;
      r.age = 18 + static_cast<int>(rng_.below(68));
      r.gender = rng_.below(2) == 0 ? Gender::Male : Gender::Female;
      const double threshold = ranges.hgb_threshold(r.gender);
      const Window hgb = is_anemic(label) ? Window{threshold - 5.0, threshold}
                                          : Window{threshold, threshold + 4.0};
      r.hgb = hgb.shrink(options_.margin).sample(rng_);
      r.mch = mch.sample(rng_);
      r.mchc = mchc.sample(rng_);
      r.wbc = rng_.uniform(4.0, 11.0);

      // Derived so the panel is self-consistent.
      r.mcv = 100.0 * r.mch / r.mchc;
      if (!mcv.contains(r.mcv)) continue;
      r.rbc = 10.0 * r.hgb / r.mch;
      r.hct = 100.0 * r.hgb / r.mchc;

      for (double* v : {&r.rbc, &r.hgb, &r.hct, &r.mcv, &r.mch, &r.mchc, &r.wbc}) {
        *v = round_sig6(*v);
      }
      if (!validate_record(r, bounds).empty()) continue;
      try {
        if (rule_label(r, ranges, MixedIndexPolicy::Strict) != label) continue;
      } catch (const UnclassifiableError&) {
        continue;
      }
      return r;
    }
    throw ValidationError("cannot generate a " + std::string(label_token(label)) +
                          " record under the given reference ranges");
  }

 private:
  const SynthOptions& options_;
  Rng rng_;
};

}  // namespace

std::vector<LabeledRecord> synth_generate(long long n, const ClassCounts& counts,
                                          const SynthOptions& options) {
  long long sum = 0;
  for (const auto& [label, count] : counts) {
    if (count < 0) {
      throw ValidationError("class count for " + std::string(label_token(label)) +
                            " is negative");
    }
    sum += count;
  }
  if (sum != n) {
    throw ValidationError("class counts sum to " + std::to_string(sum) + ", expected " +
                          std::to_string(n));
  }
  options.ranges.validate();
  if (options.margin < 0.0 || options.margin >= 0.5) {
    throw ValidationError("margin must be in [0, 0.5)");
  }

  Sampler sampler(options);
  std::vector<LabeledRecord> out;
  out.reserve(static_cast<std::size_t>(n));
  for (const auto label : sampler.shuffled_labels(counts)) {
    out.push_back({sampler.draw(label), label});
  }
  return out;
}

ClassCounts reference_training_mix() {
  return {{AnemiaLabel::Microcytic, 26},
          {AnemiaLabel::Normocytic, 40},
          {AnemiaLabel::Macrocytic, 39},
          {AnemiaLabel::NonAnemic, 42}};
}

ClassCounts scaled_reference_mix(long long total) {
  if (total < 0) throw ValidationError("total must be non-negative");
  const auto mix = reference_training_mix();
  std::array<double, 4> weights{};
  for (const auto label : kAllLabels) {
    weights[label_index(label)] = static_cast<double>(mix.at(label)) / 147.0;
  }
  const auto sizes = apportion(static_cast<std::size_t>(total), weights);
  ClassCounts out;
  for (const auto label : kAllLabels) {
    out[label] = static_cast<long long>(sizes[label_index(label)]);
  }
  return out;
}

}  // namespace hemanet
