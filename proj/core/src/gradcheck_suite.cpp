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

#include "hemanet/gradcheck_suite.hpp"

#include <algorithm>

namespace hemanet {

namespace {

void randomize(std::vector<std::span<double>> blocks, Rng& rng) {
  for (auto block : blocks) {
    for (auto& w : block) w = rng.uniform(-1.0, 1.0);
  }
}

Vector random_vector(std::size_t n, Rng& rng) {
  Vector v(n);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

Vector random_target(std::size_t outputs, Rng& rng) {
  Vector t(outputs, 0.0);
  if (outputs == 1) {
    t[0] = rng.uniform(0.05, 0.95);
  } else {
    t[rng.below(outputs)] = 1.0;
  }
  return t;
}

GradCheckResult check_one(const GradCheckVariant& variant, Rng& rng, double epsilon) {
  const std::size_t features = 2 + rng.below(8);
  const std::size_t hidden = 2 + rng.below(9);
  const std::size_t outputs = rng.below(2) == 0 ? 1 : 3;

  switch (variant.family) {
    case Family::Ffnn: {
      FfnnModel m(features, hidden, outputs);
      randomize(m.parameter_blocks(), rng);
      const auto x = random_vector(features, rng);
      return gradient_check(m, m.make_example(x, random_target(outputs, rng)), epsilon);
    }
    case Family::Elman: {
      ElmanModel m(features, hidden, outputs, variant.elman_mode, 0.0);
      randomize(m.parameter_blocks(), rng);
      for (auto& c : m.context_init()) c = rng.uniform(0.0, 1.0);
      const auto x = random_vector(features, rng);
      return gradient_check(m, m.make_example(x, random_target(outputs, rng)), epsilon);
    }
    case Family::Narx: {
      const std::size_t du = rng.below(3);
      const std::size_t dy = 1 + rng.below(2);
      NarxModel m(features, hidden, outputs, du, dy, variant.narx_mode);
      randomize(m.parameter_blocks(), rng);
      if (variant.narx_mode == NarxMode::PerRecord) {
        const auto x = random_vector(features, rng);
        return gradient_check(m, m.make_example(x, random_target(outputs, rng)), epsilon);
      }
      std::vector<Vector> rows;
      std::vector<Vector> targets;
      for (int t = 0; t < 5; ++t) {
        rows.push_back(random_vector(features, rng));
        targets.push_back(random_target(outputs, rng));
      }
      // The last step has every delay tap populated.
      const auto examples = m.stream_examples(rows, targets);
      return gradient_check(m, examples.back(), epsilon);
    }
  }
  return {};
}

}  // namespace

std::string GradCheckVariant::name() const {
  std::string out(family_name(family));
  if (family == Family::Elman) {
    out += elman_mode == SequenceMode::SingleStep ? "/single-step" : "/feature-sequence";
  } else if (family == Family::Narx) {
    out += narx_mode == NarxMode::PerRecord ? "/per-record" : "/stream";
  }
  return out;
}

std::vector<GradCheckVariant> gradcheck_variants(Family family) {
  switch (family) {
    case Family::Ffnn: return {{Family::Ffnn}};
    case Family::Elman:
      return {{Family::Elman, SequenceMode::SingleStep},
              {Family::Elman, SequenceMode::FeatureSequence}};
    case Family::Narx:
      return {{Family::Narx, SequenceMode::SingleStep, NarxMode::PerRecord},
              {Family::Narx, SequenceMode::SingleStep, NarxMode::Stream}};
  }
  return {};
}

std::vector<GradCheckVariant> all_gradcheck_variants() {
  std::vector<GradCheckVariant> out;
  for (const auto f : {Family::Ffnn, Family::Elman, Family::Narx}) {
    for (const auto& v : gradcheck_variants(f)) out.push_back(v);
  }
  return out;
}

GradCheckSummary run_gradcheck(const GradCheckVariant& variant, std::uint64_t seed,
                               std::size_t configurations, double epsilon) {
  GradCheckSummary summary;
  summary.variant = variant;
  Rng rng(seed);
  for (std::size_t i = 0; i < configurations; ++i) {
    const auto r = check_one(variant, rng, epsilon);
    summary.max_relative_error = std::max(summary.max_relative_error, r.max_relative_error);
    summary.max_absolute_error = std::max(summary.max_absolute_error, r.max_absolute_error);
    summary.parameters += r.parameters;
    ++summary.configurations;
  }
  return summary;
}

}  // namespace hemanet
