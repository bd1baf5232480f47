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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "hemanet/preprocess.hpp"
#include "hemanet/synth.hpp"
#include "support.hpp"

using namespace hemanet;

namespace {

std::vector<LabeledRecord> dataset(long long n, std::uint64_t seed) {
  return synth_generate(n, scaled_reference_mix(n), {.seed = seed});
}

// Records are not unique by value in general, so membership is tracked by
// multiset of serialized fields.
std::multiset<std::string> keys(const std::vector<LabeledRecord>& rows) {
  std::multiset<std::string> out;
  for (const auto& r : rows) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%d %d %.17g %.17g %.17g %.17g %.17g %.17g %.17g %d",
                  r.record.age, static_cast<int>(r.record.gender), r.record.rbc, r.record.hgb,
                  r.record.hct, r.record.mcv, r.record.mch, r.record.mchc, r.record.wbc,
                  label_index(r.label));
    out.insert(buf);
  }
  return out;
}

}  // namespace

TEST_SUITE("features") {
  TEST_CASE("presets and encoding") {
    CbcRecord r;
    r.age = 61;
    r.gender = Gender::Female;
    const auto v9 = encode(r, FeatureSpec::full9());
    REQUIRE(v9.size() == 9);
    CHECK(v9 == std::vector<double>{61, 1, r.rbc, r.hgb, r.hct, r.mcv, r.mch, r.mchc, r.wbc});
    const auto v7 = encode(r, FeatureSpec::paper7());
    CHECK(v7 == std::vector<double>{61, 1, r.hgb, r.hct, r.mcv, r.mch, r.mchc});
    CHECK(FeatureSpec::preset("paper7") == FeatureSpec::paper7());
    CHECK(FeatureSpec::full9().label() == "full9");
    CHECK_THROWS_AS(FeatureSpec::preset("paper8"), ValidationError);
  }

  TEST_CASE("gender changes exactly one slot") {
    CbcRecord m;
    CbcRecord f = m;
    f.gender = Gender::Female;
    const auto a = encode(m, FeatureSpec::full9());
    const auto b = encode(f, FeatureSpec::full9());
    int diffs = 0;
    for (std::size_t i = 0; i < a.size(); ++i) diffs += a[i] != b[i];
    CHECK(diffs == 1);
    CHECK(a[1] == 0.0);
    CHECK(b[1] == 1.0);
  }

  TEST_CASE("custom specs") {
    const auto spec = FeatureSpec::from_names({"hgb", "mcv"});
    CHECK(spec.size() == 2);
    CHECK(spec.label() == "hgb,mcv");
    CHECK(FeatureSpec::from_names(spec.names()) == spec);
    CHECK_THROWS_AS(FeatureSpec::from_names({"hgb", "hgb"}), ValidationError);
    CHECK_THROWS_AS(FeatureSpec::from_names({}), ValidationError);
    CHECK_THROWS_AS(FeatureSpec::from_names({"ferritin"}), ValidationError);
  }
}

TEST_SUITE("normalizer") {
  TEST_CASE("min, max and midpoint") {
    const std::vector<std::vector<double>> rows{{2}, {4}, {6}};
    const auto n = fit_normalizer(rows);
    CHECK(n.apply(std::vector<double>{2})[0] == -1.0);
    CHECK(n.apply(std::vector<double>{6})[0] == 1.0);
    CHECK(n.apply(std::vector<double>{4})[0] == 0.0);
    CHECK(n.apply(std::vector<double>{8})[0] == 2.0);
  }

  TEST_CASE("constant features") {
    const std::vector<std::vector<double>> rows{{3, 1}, {3, 2}};
    const auto n = fit_normalizer(rows);
    CHECK(n.apply(std::vector<double>{3, 1})[0] == 0.0);
    CHECK(n.apply(std::vector<double>{100, 1})[0] == 0.0);
    CHECK(n.invert(std::vector<double>{0.7, 0})[0] == 3.0);
  }

  TEST_CASE("training values stay inside [-1, 1], order is preserved") {
    Rng rng(4);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 200; ++i) rows.push_back(hemanet::testing::random_vector(rng, 5, -50, 50));
    const auto n = fit_normalizer(rows);
    for (const auto& r : rows) {
      for (const double v : n.apply(r)) {
        CHECK(v >= -1.0);
        CHECK(v <= 1.0);
      }
    }
    for (int i = 0; i < 500; ++i) {
      auto a = hemanet::testing::random_vector(rng, 5, -80, 80);
      auto b = hemanet::testing::random_vector(rng, 5, -80, 80);
      const auto na = n.apply(a);
      const auto nb = n.apply(b);
      for (std::size_t k = 0; k < 5; ++k) {
        if (a[k] < b[k]) CHECK(na[k] < nb[k]);
      }
    }
  }

  TEST_CASE("invert undoes apply") {
    Rng rng(8);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 50; ++i) rows.push_back(hemanet::testing::random_vector(rng, 9, 0, 150));
    const auto n = fit_normalizer(rows);
    for (int i = 0; i < 200; ++i) {
      const auto x = hemanet::testing::random_vector(rng, 9, -20, 200);
      const auto back = n.invert(n.apply(x));
      for (std::size_t k = 0; k < x.size(); ++k) CHECK(std::abs(back[k] - x[k]) <= 1e-12 * std::max(1.0, std::abs(x[k])));
    }
  }

  TEST_CASE("errors") {
    CHECK_THROWS_AS(fit_normalizer(std::vector<std::vector<double>>{}), ValidationError);
    const std::vector<std::vector<double>> ragged{{1, 2}, {1}};
    CHECK_THROWS_AS(fit_normalizer(ragged), DimensionError);
    CHECK_THROWS_AS(Normalizer({1}, {0}), ValidationError);
    CHECK_THROWS_AS(Normalizer({0}, {1}).apply(std::vector<double>{1, 2}), DimensionError);
  }
}

TEST_SUITE("split") {
  TEST_CASE("apportion") {
    const std::vector<double> w{0.4, 0.4, 0.2};
    CHECK(apportion(230, w) == std::vector<std::size_t>{92, 92, 46});
    CHECK(apportion(10, std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3}) ==
          std::vector<std::size_t>{4, 3, 3});
    CHECK(apportion(0, w) == std::vector<std::size_t>{0, 0, 0});
  }

  TEST_CASE("sizes for the named presets") {
    const auto data = dataset(230, 1);
    const auto s = split_dataset(data, split_preset("40-40-20"), 1);
    CHECK(s.train.size() == 92);
    CHECK(s.test.size() == 92);
    CHECK(s.validation.size() == 46);
    const auto p = split_dataset(data, split_preset("paper-materials"), 1);
    CHECK(p.train.size() == 147);
    CHECK(p.test.size() == 83);
    CHECK(p.validation.empty());
    CHECK_THROWS_AS(split_preset("50-50"), ValidationError);
  }

  TEST_CASE("partition, stratification and determinism") {
    for (const std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
      for (const long long n : {37LL, 100LL, 230LL}) {
        const auto data = dataset(n, seed);
        for (const bool stratified : {true, false}) {
          const auto s = split_dataset(data, {}, seed, stratified);
          auto joined = s.train;
          joined.insert(joined.end(), s.test.begin(), s.test.end());
          joined.insert(joined.end(), s.validation.begin(), s.validation.end());
          CHECK(keys(joined) == keys(data));
          const auto sizes = apportion(data.size(), std::vector<double>{0.4, 0.4, 0.2});
          CHECK(s.train.size() == sizes[0]);
          CHECK(s.test.size() == sizes[1]);
          CHECK(s.validation.size() == sizes[2]);
          if (!stratified) continue;
          for (const auto label : kAllLabels) {
            const auto in = [&](const std::vector<LabeledRecord>& part) {
              return static_cast<double>(std::count_if(part.begin(), part.end(), [&](const auto& r) {
                return r.label == label;
              }));
            };
            const double total = in(data);
            CHECK(std::abs(in(s.train) - 0.4 * total) <= 1.0 + 1e-9);
            CHECK(std::abs(in(s.test) - 0.4 * total) <= 1.0 + 1e-9);
            CHECK(std::abs(in(s.validation) - 0.2 * total) <= 1.0 + 1e-9);
          }
        }
      }
    }
    const auto data = dataset(230, 7);
    const auto a = split_dataset(data, {}, 42);
    const auto b = split_dataset(data, {}, 42);
    const auto c = split_dataset(data, {}, 43);
    CHECK(a.train == b.train);
    CHECK(a.test == b.test);
    CHECK(a.validation == b.validation);
    CHECK(a.train != c.train);
  }

  TEST_CASE("invalid fractions") {
    const auto data = dataset(20, 1);
    CHECK_THROWS_AS(split_dataset(data, {0.5, 0.5, 0.5}, 1), ValidationError);
    CHECK_THROWS_AS(split_dataset(data, {0.0, 0.8, 0.2}, 1), ValidationError);
    CHECK_THROWS_AS(split_dataset(data, {1.2, 0.0, -0.2}, 1), ValidationError);
    CHECK_THROWS_AS(split_dataset(std::vector<LabeledRecord>(1), {}, 1), ValidationError);
  }
}
