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

#include "hemanet/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hemanet/error.hpp"

namespace hemanet {

namespace {

Vector sigmoid_delta(std::span<const double> upstream, std::span<const double> activation) {
  Vector delta(activation.size());
  for (std::size_t i = 0; i < activation.size(); ++i) {
    delta[i] = upstream[i] * activation[i] * (1.0 - activation[i]);
  }
  return delta;
}

void add_to(Vector& dst, std::span<const double> src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

const Vector& single_step(const Example& example) {
  if (example.steps.size() != 1) {
    throw DimensionError("feedforward example must have exactly one step, got " +
                         std::to_string(example.steps.size()));
  }
  return example.steps.front();
}

}  // namespace

// ---------------------------------------------------------------------------
// FfnnModel

FfnnModel::FfnnModel(std::size_t inputs, std::size_t hidden, std::size_t outputs)
    : layers_{LayerParams(hidden, inputs), LayerParams(outputs, hidden)} {}

FfnnModel::FfnnModel(LayerParams hidden, LayerParams output)
    : layers_{std::move(hidden), std::move(output)} {
  if (layers_[1].in_dim() != layers_[0].out_dim()) {
    throw DimensionError("output layer expects " + std::to_string(layers_[1].in_dim()) +
                         " inputs but hidden layer has " + std::to_string(layers_[0].out_dim()));
  }
}

FfnnModel FfnnModel::initialized(std::size_t inputs, std::size_t hidden, std::size_t outputs,
                                 Rng& rng) {
  auto h = LayerParams::glorot(hidden, inputs, rng);
  auto o = LayerParams::glorot(outputs, hidden, rng);
  return FfnnModel(std::move(h), std::move(o));
}

Vector FfnnModel::forward(std::span<const double> input) const {
  const auto hidden = forward_dense(layers_[0], input);
  return forward_dense(layers_[1], hidden.activation).activation;
}

Example FfnnModel::make_example(std::span<const double> features, Vector target) const {
  return {{Vector(features.begin(), features.end())}, std::move(target)};
}

double FfnnModel::loss(const Example& example) const {
  return mse_loss(forward(single_step(example)), example.target);
}

Gradient<FfnnModel> FfnnModel::gradient(const Example& example) const {
  auto bp = backprop(layers_, single_step(example), example.target);
  Gradient<FfnnModel> g;
  g.gradients.layers_ = std::move(bp.gradients);
  g.loss = bp.loss;
  return g;
}

FfnnModel FfnnModel::zeros_like() const {
  return FfnnModel(input_size(), hidden_size(), output_size());
}

std::vector<std::span<double>> FfnnModel::parameter_blocks() {
  return {layers_[0].weights.values(), layers_[0].biases, layers_[1].weights.values(),
          layers_[1].biases};
}

std::vector<std::span<const double>> FfnnModel::parameter_blocks() const {
  return {layers_[0].weights.values(), layers_[0].biases, layers_[1].weights.values(),
          layers_[1].biases};
}

// ---------------------------------------------------------------------------
// ElmanModel

ElmanModel::ElmanModel(std::size_t features, std::size_t hidden, std::size_t outputs,
                       SequenceMode mode, double context_init)
    : features_(features),
      mode_(mode),
      input_(hidden, mode == SequenceMode::SingleStep ? features : 1),
      recurrent_(hidden, hidden),
      output_(outputs, hidden),
      context_init_(hidden, context_init) {}

ElmanModel ElmanModel::initialized(std::size_t features, std::size_t hidden,
                                   std::size_t outputs, SequenceMode mode, double context_init,
                                   Rng& rng) {
  ElmanModel m(features, hidden, outputs, mode, context_init);
  m.input_ = LayerParams::glorot(hidden, m.step_width(), rng);
  const double r = std::sqrt(6.0 / static_cast<double>(2 * hidden));
  for (auto& w : m.recurrent_.values()) w = rng.uniform(-r, r);
  m.output_ = LayerParams::glorot(outputs, hidden, rng);
  return m;
}

std::vector<Vector> ElmanModel::to_steps(std::span<const double> features) const {
  if (features.size() != features_) {
    throw DimensionError("Elman model expects " + std::to_string(features_) +
                         " features, got " + std::to_string(features.size()));
  }
  if (mode_ == SequenceMode::SingleStep) return {Vector(features.begin(), features.end())};
  std::vector<Vector> steps;
  steps.reserve(features.size());
  for (const double f : features) steps.push_back({f});
  return steps;
}

ElmanModel::Trace ElmanModel::run(std::span<const Vector> steps) const {
  if (steps.empty()) throw DimensionError("Elman forward needs at least one step");
  Trace trace;
  trace.hidden.reserve(steps.size() + 1);
  trace.hidden.push_back(context_init_);
  for (const auto& x : steps) {
    if (x.size() != step_width()) {
      throw DimensionError("Elman step expects width " + std::to_string(step_width()) +
                           ", got " + std::to_string(x.size()));
    }
    Vector pre = input_.biases;
    multiply_add(input_.weights, x, pre);
    multiply_add(recurrent_, trace.hidden.back(), pre);
    for (auto& v : pre) v = sigmoid(v);
    trace.hidden.push_back(std::move(pre));
  }
  trace.output = forward_dense(output_, trace.hidden.back()).activation;
  return trace;
}

Vector ElmanModel::forward(std::span<const Vector> steps) const { return run(steps).output; }

Vector ElmanModel::predict(std::span<const double> features) const {
  return forward(to_steps(features));
}

Example ElmanModel::make_example(std::span<const double> features, Vector target) const {
  return {to_steps(features), std::move(target)};
}

double ElmanModel::loss(const Example& example) const {
  return mse_loss(forward(example.steps), example.target);
}

Gradient<ElmanModel> ElmanModel::gradient(const Example& example) const {
  const auto trace = run(example.steps);
  Gradient<ElmanModel> g{zeros_like(), mse_loss(trace.output, example.target)};
  auto& grad = g.gradients;

  const Vector delta_out = sigmoid_delta(mse_grad(trace.output, example.target), trace.output);
  add_outer(grad.output_.weights, delta_out, trace.hidden.back());
  grad.output_.biases = delta_out;

  Vector upstream = multiply_transposed(output_.weights, delta_out);
  for (std::size_t t = example.steps.size(); t > 0; --t) {
    const Vector delta = sigmoid_delta(upstream, trace.hidden[t]);
    add_outer(grad.input_.weights, delta, example.steps[t - 1]);
    add_outer(grad.recurrent_, delta, trace.hidden[t - 1]);
    add_to(grad.input_.biases, delta);
    if (t > 1) upstream = multiply_transposed(recurrent_, delta);
  }
  return g;
}

ElmanModel ElmanModel::zeros_like() const {
  ElmanModel m(features_, hidden_size(), output_size(), mode_, 0.0);
  m.context_init_ = context_init_;
  return m;
}

std::vector<std::span<double>> ElmanModel::parameter_blocks() {
  return {input_.weights.values(), input_.biases, recurrent_.values(), output_.weights.values(),
          output_.biases};
}

std::vector<std::span<const double>> ElmanModel::parameter_blocks() const {
  return {input_.weights.values(), input_.biases, recurrent_.values(), output_.weights.values(),
          output_.biases};
}

// ---------------------------------------------------------------------------
// NarxModel

NarxModel::NarxModel(std::size_t features, std::size_t hidden, std::size_t outputs,
                     std::size_t input_delays, std::size_t output_delays, NarxMode mode)
    : net_(features * (1 + input_delays) + outputs * output_delays, hidden, outputs),
      features_(features),
      input_delays_(input_delays),
      output_delays_(output_delays),
      mode_(mode) {
  if (output_delays < 1) throw ValidationError("NARX output delay order must be >= 1");
}

NarxModel NarxModel::initialized(std::size_t features, std::size_t hidden, std::size_t outputs,
                                 std::size_t input_delays, std::size_t output_delays,
                                 NarxMode mode, Rng& rng) {
  NarxModel m(features, hidden, outputs, input_delays, output_delays, mode);
  m.net_ = FfnnModel::initialized(m.tapped_width(), hidden, outputs, rng);
  return m;
}

Vector NarxModel::assemble(std::span<const double> current, std::span<const Vector> past_inputs,
                           std::span<const Vector> past_targets) const {
  if (current.size() != features_) {
    throw DimensionError("NARX model expects " + std::to_string(features_) + " features, got " +
                         std::to_string(current.size()));
  }
  Vector input(tapped_width(), 0.0);
  std::copy(current.begin(), current.end(), input.begin());
  auto pos = input.begin() + static_cast<long>(features_);
  for (std::size_t k = 0; k < input_delays_; ++k, pos += static_cast<long>(features_)) {
    if (k >= past_inputs.size()) continue;
    if (past_inputs[k].size() != features_) throw DimensionError("NARX input tap width mismatch");
    std::copy(past_inputs[k].begin(), past_inputs[k].end(), pos);
  }
  const auto outputs = output_size();
  for (std::size_t k = 0; k < output_delays_; ++k, pos += static_cast<long>(outputs)) {
    if (k >= past_targets.size()) continue;
    if (past_targets[k].size() != outputs) throw DimensionError("NARX output tap width mismatch");
    std::copy(past_targets[k].begin(), past_targets[k].end(), pos);
  }
  return input;
}

Vector NarxModel::predict(std::span<const double> features) const {
  if (mode_ == NarxMode::Stream) {
    throw ValidationError("stream-mode NARX prediction needs labeled history");
  }
  return forward(assemble(features, {}, {}));
}

Example NarxModel::make_example(std::span<const double> features, Vector target) const {
  return {{assemble(features, {}, {})}, std::move(target)};
}

std::vector<Example> NarxModel::stream_examples(std::span<const Vector> rows,
                                                std::span<const Vector> targets) const {
  if (rows.size() != targets.size()) {
    throw ValidationError("NARX stream needs one target per row (" +
                          std::to_string(rows.size()) + " rows, " +
                          std::to_string(targets.size()) + " targets)");
  }
  std::vector<Example> out;
  out.reserve(rows.size());
  std::vector<Vector> past_inputs;
  std::vector<Vector> past_targets;
  for (std::size_t t = 0; t < rows.size(); ++t) {
    past_inputs.clear();
    past_targets.clear();
    for (std::size_t k = 1; k <= input_delays_ && k <= t; ++k) past_inputs.push_back(rows[t - k]);
    for (std::size_t k = 1; k <= output_delays_ && k <= t; ++k) {
      past_targets.push_back(targets[t - k]);
    }
    out.push_back({{assemble(rows[t], past_inputs, past_targets)}, targets[t]});
  }
  return out;
}

std::vector<NarxModel::StreamStep> NarxModel::forward_stream(
    std::span<const Vector> rows, std::span<const Vector> targets) const {
  std::vector<StreamStep> out;
  for (const auto& ex : stream_examples(rows, targets)) {
    StreamStep step;
    step.output = forward(ex.steps.front());
    step.residual.resize(step.output.size());
    for (std::size_t i = 0; i < step.output.size(); ++i) {
      step.residual[i] = ex.target[i] - step.output[i];
    }
    out.push_back(std::move(step));
  }
  return out;
}

Gradient<NarxModel> NarxModel::gradient(const Example& example) const {
  auto inner = net_.gradient(example);
  Gradient<NarxModel> g{zeros_like(), inner.loss};
  g.gradients.net_ = std::move(inner.gradients);
  return g;
}

NarxModel NarxModel::zeros_like() const {
  NarxModel m = *this;
  m.net_ = net_.zeros_like();
  return m;
}

// ---------------------------------------------------------------------------
// Family, stage and output-encoding helpers

std::string_view family_name(Family family) {
  switch (family) {
    case Family::Ffnn: return "ffnn";
    case Family::Elman: return "elman";
    case Family::Narx: return "narx";
  }
  return "unknown";
}

std::optional<Family> parse_family(std::string_view token) {
  for (const auto f : {Family::Ffnn, Family::Elman, Family::Narx}) {
    if (family_name(f) == token) return f;
  }
  return std::nullopt;
}

Family family_of(const Network& network) {
  switch (network.index()) {
    case 0: return Family::Ffnn;
    case 1: return Family::Elman;
    default: return Family::Narx;
  }
}

std::size_t output_size(const Network& network) {
  return std::visit([](const auto& m) { return m.output_size(); }, network);
}

std::string_view stage_name(Stage stage) {
  return stage == Stage::Diagnosis ? "diagnosis" : "classify";
}

std::optional<Stage> parse_stage(std::string_view token) {
  if (token == "diagnosis") return Stage::Diagnosis;
  if (token == "classify" || token == "classification") return Stage::Classification;
  return std::nullopt;
}

std::string_view encoding_name(OutputEncoding encoding) {
  switch (encoding) {
    case OutputEncoding::Binary: return "binary";
    case OutputEncoding::OneHot3: return "onehot3";
    case OutputEncoding::Banded1: return "banded1";
  }
  return "unknown";
}

std::optional<OutputEncoding> parse_encoding(std::string_view token) {
  for (const auto e : {OutputEncoding::Binary, OutputEncoding::OneHot3, OutputEncoding::Banded1}) {
    if (encoding_name(e) == token) return e;
  }
  return std::nullopt;
}

std::size_t output_width(OutputEncoding encoding) {
  return encoding == OutputEncoding::OneHot3 ? 3 : 1;
}

Vector encode_target(AnemiaLabel label, OutputEncoding encoding) {
  switch (encoding) {
    case OutputEncoding::Binary: return {static_cast<double>(diagnosis_of(label))};
    case OutputEncoding::OneHot3: {
      if (!is_anemic(label)) throw ValidationError("subtype target for a non-anemic label");
      Vector t(3, 0.0);
      t[static_cast<std::size_t>(label_index(label) - 1)] = 1.0;
      return t;
    }
    case OutputEncoding::Banded1: {
      if (!is_anemic(label)) throw ValidationError("subtype target for a non-anemic label");
      return {(2.0 * (label_index(label) - 1) + 1.0) / 6.0};
    }
  }
  return {};
}

AnemiaLabel decode_subtype(std::span<const double> outputs, OutputEncoding encoding) {
  if (outputs.size() != output_width(encoding) || encoding == OutputEncoding::Binary) {
    throw DimensionError("cannot decode a subtype from " + std::to_string(outputs.size()) +
                         " outputs with encoding " + std::string(encoding_name(encoding)));
  }
  std::size_t best = 0;
  if (encoding == OutputEncoding::OneHot3) {
    for (std::size_t i = 1; i < outputs.size(); ++i) {
      if (outputs[i] > outputs[best]) best = i;
    }
  } else {
    const double centers[] = {1.0 / 6.0, 0.5, 5.0 / 6.0};
    for (std::size_t i = 1; i < 3; ++i) {
      if (std::abs(outputs[0] - centers[i]) < std::abs(outputs[0] - centers[best])) best = i;
    }
  }
  return kAnemiaSubtypes[best];
}

}  // namespace hemanet
