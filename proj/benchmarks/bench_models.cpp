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

#include <benchmark/benchmark.h>

#include <vector>

#include "hemanet/models.hpp"
#include "hemanet/train.hpp"

using namespace hemanet;

namespace {

constexpr std::size_t kFeatures = 9;

std::vector<Example> examples(const auto& model, std::size_t n, Rng& rng) {
  std::vector<Example> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vector x(kFeatures);
    for (auto& v : x) v = rng.uniform(-1, 1);
    out.push_back(model.make_example(x, Vector{rng.uniform() < 0.5 ? 0.0 : 1.0}));
  }
  return out;
}

FfnnModel make_ffnn(std::size_t hidden, Rng& rng) {
  return FfnnModel::initialized(kFeatures, hidden, 1, rng);
}
ElmanModel make_elman(std::size_t hidden, Rng& rng) {
  return ElmanModel::initialized(kFeatures, hidden, 1, SequenceMode::SingleStep, 0.5, rng);
}
ElmanModel make_elman_seq(std::size_t hidden, Rng& rng) {
  return ElmanModel::initialized(kFeatures, hidden, 1, SequenceMode::FeatureSequence, 0.5, rng);
}
NarxModel make_narx(std::size_t hidden, Rng& rng) {
  return NarxModel::initialized(kFeatures, hidden, 1, 1, 1, NarxMode::PerRecord, rng);
}

template <auto Make>
void BM_Forward(benchmark::State& state) {
  Rng rng(1);
  const auto model = Make(static_cast<std::size_t>(state.range(0)), rng);
  Vector x(kFeatures, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(model.predict(x));
}

template <auto Make>
void BM_Gradient(benchmark::State& state) {
  Rng rng(2);
  const auto model = Make(static_cast<std::size_t>(state.range(0)), rng);
  const auto ex = examples(model, 1, rng);
  for (auto _ : state) benchmark::DoNotOptimize(model.gradient(ex[0]));
}

// One full-batch epoch over a 92-record training split.
template <auto Make>
void BM_Epoch(benchmark::State& state) {
  Rng rng(3);
  const auto model = Make(static_cast<std::size_t>(state.range(0)), rng);
  const auto train = examples(model, 92, rng);
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.hidden = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_loop(model, train, {}, cfg));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(train.size()));
}

}  // namespace

BENCHMARK(BM_Forward<make_ffnn>)->Arg(50)->Arg(100);
BENCHMARK(BM_Forward<make_elman>)->Arg(50)->Arg(100);
BENCHMARK(BM_Forward<make_elman_seq>)->Arg(50);
BENCHMARK(BM_Forward<make_narx>)->Arg(50)->Arg(100);

BENCHMARK(BM_Gradient<make_ffnn>)->Arg(50)->Arg(100);
BENCHMARK(BM_Gradient<make_elman>)->Arg(50)->Arg(100);
BENCHMARK(BM_Gradient<make_elman_seq>)->Arg(50);
BENCHMARK(BM_Gradient<make_narx>)->Arg(50)->Arg(100);

BENCHMARK(BM_Epoch<make_ffnn>)->Arg(50);
BENCHMARK(BM_Epoch<make_elman>)->Arg(50);
BENCHMARK(BM_Epoch<make_narx>)->Arg(50);

BENCHMARK_MAIN();
