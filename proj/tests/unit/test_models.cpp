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
#include <cstring>

#include "hemanet/gradcheck.hpp"
#include "hemanet/gradcheck_suite.hpp"
#include "hemanet/model_file.hpp"
#include "hemanet/models.hpp"
#include "support.hpp"

using namespace hemanet;
using hemanet::testing::random_vector;

namespace {

LayerParams random_layer(Rng& rng, std::size_t out, std::size_t in) {
  LayerParams l(out, in);
  for (auto& w : l.weights.values()) w = rng.uniform(-1, 1);
  for (auto& b : l.biases) b = rng.uniform(-1, 1);
  return l;
}

bool same_bits(const Vector& a, const Vector& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

double max_abs_diff(const Vector& a, const Vector& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

ModelFile random_model_file(Family family, Stage stage, std::uint64_t seed) {
  Rng rng(seed);
  ModelFile f;
  f.stage = stage;
  f.features = FeatureSpec::full9();
  f.encoding = stage == Stage::Diagnosis ? OutputEncoding::Binary : OutputEncoding::OneHot3;
  std::vector<double> mins(9);
  std::vector<double> maxs(9);
  for (std::size_t i = 0; i < 9; ++i) {
    mins[i] = rng.uniform(0, 50);
    maxs[i] = mins[i] + rng.uniform(0.1, 100);
  }
  f.normalizer = Normalizer(mins, maxs);
  const std::size_t out = output_width(f.encoding);
  switch (family) {
    case Family::Ffnn:
      f.network = FfnnModel::initialized(9, 7, out, rng);
      break;
    case Family::Elman: {
      auto m = ElmanModel::initialized(9, 6, out, SequenceMode::FeatureSequence, 0.5, rng);
      for (auto& w : m.recurrent().values()) w = rng.uniform(-1, 1);
      for (auto& c : m.context_init()) c = rng.uniform(0, 1);
      f.network = std::move(m);
      break;
    }
    case Family::Narx:
      f.network = NarxModel::initialized(9, 5, out, 2, 1, NarxMode::PerRecord, rng);
      break;
  }
  f.meta.config.seed = seed;
  f.meta.epochs_run = 12;
  f.meta.final_train_loss = 0.1 / 3.0;
  return f;
}

CbcRecord random_record(Rng& rng) {
  CbcRecord r;
  r.age = static_cast<int>(rng.below(100));
  r.gender = rng.below(2) ? Gender::Female : Gender::Male;
  r.rbc = rng.uniform(2, 6);
  r.hgb = rng.uniform(6, 18);
  r.hct = rng.uniform(20, 55);
  r.mcv = rng.uniform(60, 120);
  r.mch = rng.uniform(18, 40);
  r.mchc = rng.uniform(28, 38);
  r.wbc = rng.uniform(3, 12);
  return r;
}

}  // namespace

TEST_SUITE("ffnn") {
  TEST_CASE("zero network outputs one half") {
    const FfnnModel m(5, 4, 1);
    CHECK(m.forward(std::vector<double>{1, 2, 3, 4, 5}) == Vector{0.5});
  }

  TEST_CASE("outputs in (0,1) and repeatable") {
    Rng rng(1);
    const auto m = FfnnModel::initialized(4, 6, 3, rng);
    for (int i = 0; i < 50; ++i) {
      const auto x = random_vector(rng, 4, -3, 3);
      const auto y = m.forward(x);
      CHECK(y == m.forward(x));
      for (const double v : y) {
        CHECK(v > 0);
        CHECK(v < 1);
      }
    }
  }

  TEST_CASE("glorot init bounds") {
    Rng rng(2);
    const auto l = LayerParams::glorot(10, 20, rng);
    const double r = std::sqrt(6.0 / 30.0);
    for (const double w : l.weights.values()) CHECK(std::abs(w) <= r);
    for (const double b : l.biases) CHECK(b == 0.0);
    CHECK_THROWS_AS(FfnnModel(LayerParams(3, 2), LayerParams(1, 4)), DimensionError);
  }
}

TEST_SUITE("elman") {
  TEST_CASE("reduces to a feedforward net with no recurrence and zero context") {
    Rng rng(3);
    const auto hidden = random_layer(rng, 6, 5);
    const auto output = random_layer(rng, 2, 6);
    const FfnnModel ff(hidden, output);
    ElmanModel el(5, 6, 2, SequenceMode::SingleStep, 0.0);
    el.input_layer() = hidden;
    el.output_layer() = output;
    for (int i = 0; i < 100; ++i) {
      const auto x = random_vector(rng, 5);
      CHECK(max_abs_diff(el.predict(x), ff.forward(x)) <= 1e-12);

      const Example ex{{x}, random_vector(rng, 2, 0, 1)};
      const auto ge = el.gradient(ex).gradients;
      const auto gf = ff.gradient(ex).gradients;
      CHECK(max_abs_diff(Vector(ge.input_layer().weights.values().begin(), ge.input_layer().weights.values().end()),
                         Vector(gf.hidden().weights.values().begin(), gf.hidden().weights.values().end())) <= 1e-12);
      CHECK(max_abs_diff(ge.output_layer().biases, gf.output().biases) <= 1e-12);
      // With a zero context the recurrent weights cannot influence a single step.
      for (const double w : ge.recurrent().values()) CHECK(w == 0.0);
    }
  }

  TEST_CASE("feature-sequence mode runs one step per feature") {
    Rng rng(4);
    const auto m = ElmanModel::initialized(9, 4, 1, SequenceMode::FeatureSequence, 0.5, rng);
    const auto x = random_vector(rng, 9);
    CHECK(m.to_steps(x).size() == 9);
    CHECK(m.step_width() == 1);
    CHECK(m.predict(x).size() == 1);
    CHECK_THROWS_AS(m.predict(random_vector(rng, 8)), DimensionError);
  }

  TEST_CASE("context resets between records") {
    Rng rng(5);
    auto m = ElmanModel::initialized(4, 5, 3, SequenceMode::SingleStep, 0.5, rng);
    for (auto& w : m.recurrent().values()) w = rng.uniform(-1, 1);
    std::vector<Vector> batch;
    for (int i = 0; i < 20; ++i) batch.push_back(random_vector(rng, 4));
    std::vector<Vector> first;
    for (const auto& x : batch) first.push_back(m.predict(x));
    std::vector<std::size_t> order(batch.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    for (const auto i : order) CHECK(same_bits(m.predict(batch[i]), first[i]));
  }

  TEST_CASE("zero loss gives zero gradients") {
    Rng rng(6);
    auto m = ElmanModel::initialized(3, 4, 2, SequenceMode::FeatureSequence, 0.5, rng);
    const auto x = random_vector(rng, 3);
    const auto ex = m.make_example(x, m.predict(x));
    const auto g = m.gradient(ex);
    CHECK(g.loss == 0.0);
    for (const auto block : std::as_const(g.gradients).parameter_blocks()) {
      for (const double v : block) CHECK(v == 0.0);
    }
  }
}

TEST_SUITE("narx") {
  TEST_CASE("per-record with no input delays is a feedforward net with zero taps") {
    Rng rng(7);
    const auto hidden = random_layer(rng, 5, 4 + 2);  // F + dy*O
    const auto output = random_layer(rng, 2, 5);
    NarxModel narx(4, 5, 2, 0, 1, NarxMode::PerRecord);
    narx.network() = FfnnModel(hidden, output);
    const FfnnModel ff(hidden, output);
    for (int i = 0; i < 100; ++i) {
      auto x = random_vector(rng, 4);
      const auto y = narx.predict(x);
      x.push_back(0.0);
      x.push_back(0.0);
      CHECK(max_abs_diff(y, ff.forward(x)) <= 1e-12);
    }
  }

  TEST_CASE("stream mode feeds back the previous true target") {
    Rng rng(8);
    const auto m = NarxModel::initialized(3, 4, 1, 1, 2, NarxMode::Stream, rng);
    std::vector<Vector> rows;
    std::vector<Vector> targets;
    for (int t = 0; t < 6; ++t) {
      rows.push_back(random_vector(rng, 3));
      targets.push_back({static_cast<double>(t % 2)});
    }
    const auto ex = m.stream_examples(rows, targets);
    REQUIRE(ex.size() == 6);
    const std::size_t y_at = 3 * 2;  // after x_t and x_{t-1}
    CHECK(ex[0].steps[0][y_at] == 0.0);
    for (std::size_t t = 1; t < 6; ++t) {
      const auto& in = ex[t].steps[0];
      CHECK(in.size() == m.tapped_width());
      CHECK(std::equal(rows[t - 1].begin(), rows[t - 1].end(), in.begin() + 3));
      CHECK(in[y_at] == targets[t - 1][0]);
      if (t >= 2) CHECK(in[y_at + 1] == targets[t - 2][0]);
    }
    const auto steps = m.forward_stream(rows, targets);
    for (std::size_t t = 0; t < 6; ++t) {
      CHECK(steps[t].residual[0] == targets[t][0] - steps[t].output[0]);
    }
    CHECK_THROWS_AS(m.predict(rows[0]), ValidationError);
    CHECK_THROWS_AS(m.stream_examples(rows, std::vector<Vector>(2)), ValidationError);
  }
}

TEST_SUITE("gradient checks per family") {
  TEST_CASE("every variant passes on random configurations") {
    for (const auto& v : all_gradcheck_variants()) {
      const auto s = run_gradcheck(v, 123, 10);
      INFO(v.name());
      CHECK(s.configurations == 10);
      CHECK(s.max_relative_error < 1e-4);
    }
    CHECK(all_gradcheck_variants().size() == 5);
    CHECK(gradcheck_variants(Family::Elman).size() == 2);
  }

  TEST_CASE("coarse step still passes at 1e-3") {
    for (const auto& v : all_gradcheck_variants()) {
      CHECK(run_gradcheck(v, 5, 5, 1e-3).max_relative_error < 1e-3);
    }
  }
}

TEST_SUITE("encodings") {
  TEST_CASE("targets and decoding") {
    CHECK(encode_target(AnemiaLabel::Microcytic, OutputEncoding::Binary) == Vector{1.0});
    CHECK(encode_target(AnemiaLabel::NonAnemic, OutputEncoding::Binary) == Vector{0.0});
    CHECK(encode_target(AnemiaLabel::Normocytic, OutputEncoding::OneHot3) == Vector{0, 1, 0});
    CHECK(encode_target(AnemiaLabel::Macrocytic, OutputEncoding::Banded1)[0] ==
          doctest::Approx(5.0 / 6.0));
    CHECK_THROWS_AS(encode_target(AnemiaLabel::NonAnemic, OutputEncoding::OneHot3),
                    ValidationError);

    CHECK(decode_subtype(Vector{0.9, 0.2, 0.1}, OutputEncoding::OneHot3) == AnemiaLabel::Microcytic);
    CHECK(decode_subtype(Vector{0.4, 0.4, 0.1}, OutputEncoding::OneHot3) == AnemiaLabel::Microcytic);
    CHECK(decode_subtype(Vector{0.1, 0.6, 0.6}, OutputEncoding::OneHot3) == AnemiaLabel::Normocytic);
    CHECK(decode_subtype(Vector{0.49}, OutputEncoding::Banded1) == AnemiaLabel::Normocytic);
    CHECK(decode_subtype(Vector{0.0}, OutputEncoding::Banded1) == AnemiaLabel::Microcytic);
    CHECK(decode_subtype(Vector{0.99}, OutputEncoding::Banded1) == AnemiaLabel::Macrocytic);
    CHECK(decode_subtype(Vector{1.0 / 3.0}, OutputEncoding::Banded1) == AnemiaLabel::Microcytic);
  }

  TEST_CASE("tokens") {
    for (const auto f : {Family::Ffnn, Family::Elman, Family::Narx}) {
      CHECK(parse_family(family_name(f)) == f);
    }
    CHECK_FALSE(parse_family("lstm").has_value());
    CHECK(parse_stage("classify") == Stage::Classification);
    CHECK(parse_encoding("banded1") == OutputEncoding::Banded1);
  }
}

TEST_SUITE("model files") {
  TEST_CASE("round trip gives bit-identical predictions for every family") {
    hemanet::testing::TempDir dir;
    for (const auto family : {Family::Ffnn, Family::Elman, Family::Narx}) {
      for (const auto stage : {Stage::Diagnosis, Stage::Classification}) {
        const auto original = random_model_file(family, stage, 31);
        const auto path = dir.file("m.json");
        save_model(original, path);
        const auto loaded = load_model(path);
        CHECK(loaded.family() == family);
        CHECK(loaded.stage == stage);
        CHECK(loaded.normalizer == original.normalizer);
        CHECK(loaded.network == original.network);
        CHECK(loaded.meta.final_train_loss == original.meta.final_train_loss);
        CHECK(model_to_json(loaded) == model_to_json(original));
        Rng rng(99);
        for (int i = 0; i < 100; ++i) {
          const auto r = random_record(rng);
          CHECK(same_bits(loaded.predict(r), original.predict(r)));
        }
      }
    }
  }

  TEST_CASE("truncated and corrupt files are rejected cleanly") {
    const auto text = model_to_json(random_model_file(Family::Elman, Stage::Diagnosis, 1));
    for (const std::size_t cut : {std::size_t{0}, std::size_t{1}, text.size() / 3, text.size() - 3}) {
      CHECK_THROWS_AS(model_from_json(text.substr(0, cut)), FormatError);
    }
    CHECK_THROWS_AS(model_from_json("[1,2,3]"), FormatError);
    CHECK_THROWS_AS(load_model("/nonexistent/model.json"), DataError);

    auto j = text;
    const auto at = j.find("\"elman\"");
    REQUIRE(at != std::string::npos);
    j.replace(at, 7, "\"gru\"");
    CHECK_THROWS_AS(model_from_json(j), FormatError);
  }

  TEST_CASE("newer major version is refused with an explanation") {
    auto text = model_to_json(random_model_file(Family::Ffnn, Stage::Diagnosis, 2));
    const auto at = text.find("\"1.0\"");
    REQUIRE(at != std::string::npos);
    text.replace(at, 5, "\"2.0\"");
    try {
      model_from_json(text);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find("newer") != std::string::npos);
    }
    text.replace(at, 5, "\"1.7\"");
    CHECK_NOTHROW(model_from_json(text));
  }

  TEST_CASE("shape mismatches are rejected") {
    auto text = model_to_json(random_model_file(Family::Ffnn, Stage::Diagnosis, 3));
    const auto at = text.find("\"cols\": 9");
    REQUIRE(at != std::string::npos);
    text.replace(at, 9, "\"cols\": 8");
    CHECK_THROWS_AS(model_from_json(text), FormatError);
  }
}
