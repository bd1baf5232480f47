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

#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "hemanet/cbc.hpp"
#include "hemanet/nn.hpp"

namespace hemanet {

/// Single-hidden-layer sigmoid network: features -> hidden -> outputs.
class FfnnModel {
 public:
  FfnnModel() = default;
  /// All weights and biases zero.
  FfnnModel(std::size_t inputs, std::size_t hidden, std::size_t outputs);
  /// Throws DimensionError unless output.in_dim() == hidden.out_dim().
  FfnnModel(LayerParams hidden, LayerParams output);
  static FfnnModel initialized(std::size_t inputs, std::size_t hidden, std::size_t outputs,
                               Rng& rng);

  std::size_t input_size() const { return layers_[0].in_dim(); }
  std::size_t hidden_size() const { return layers_[0].out_dim(); }
  std::size_t output_size() const { return layers_[1].out_dim(); }

  const LayerParams& hidden() const { return layers_[0]; }
  LayerParams& hidden() { return layers_[0]; }
  const LayerParams& output() const { return layers_[1]; }
  LayerParams& output() { return layers_[1]; }

  Vector forward(std::span<const double> input) const;
  Vector predict(std::span<const double> features) const { return forward(features); }
  Example make_example(std::span<const double> features, Vector target) const;

  double loss(const Example& example) const;
  Gradient<FfnnModel> gradient(const Example& example) const;

  FfnnModel zeros_like() const;
  std::vector<std::span<double>> parameter_blocks();
  std::vector<std::span<const double>> parameter_blocks() const;

  bool operator==(const FfnnModel&) const = default;

 private:
  std::vector<LayerParams> layers_{2};
};

enum class SequenceMode {
  SingleStep,       // the whole record is one step of width F
  FeatureSequence,  // each feature is one step of width 1
};

/// Elman network: h_t = sigmoid(W_x x_t + W_h h_{t-1} + b), y = sigmoid(W_o h_T + b_o).
///
/// The context starts from context_init for every sample, so forward passes
/// are independent of call history.
class ElmanModel {
 public:
  ElmanModel() = default;
  ElmanModel(std::size_t features, std::size_t hidden, std::size_t outputs,
             SequenceMode mode = SequenceMode::SingleStep, double context_init = 0.5);
  static ElmanModel initialized(std::size_t features, std::size_t hidden, std::size_t outputs,
                                SequenceMode mode, double context_init, Rng& rng);

  std::size_t feature_count() const { return features_; }
  std::size_t step_width() const { return input_.in_dim(); }
  std::size_t hidden_size() const { return input_.out_dim(); }
  std::size_t output_size() const { return output_.out_dim(); }
  SequenceMode mode() const { return mode_; }

  LayerParams& input_layer() { return input_; }
  const LayerParams& input_layer() const { return input_; }
  Matrix& recurrent() { return recurrent_; }
  const Matrix& recurrent() const { return recurrent_; }
  LayerParams& output_layer() { return output_; }
  const LayerParams& output_layer() const { return output_; }
  Vector& context_init() { return context_init_; }
  const Vector& context_init() const { return context_init_; }

  /// Splits a feature vector into steps according to mode().
  std::vector<Vector> to_steps(std::span<const double> features) const;

  Vector forward(std::span<const Vector> steps) const;
  Vector predict(std::span<const double> features) const;
  Example make_example(std::span<const double> features, Vector target) const;

  /// Backpropagation through time over all steps of the example.
  double loss(const Example& example) const;
  Gradient<ElmanModel> gradient(const Example& example) const;

  ElmanModel zeros_like() const;
  std::vector<std::span<double>> parameter_blocks();
  std::vector<std::span<const double>> parameter_blocks() const;

  bool operator==(const ElmanModel&) const = default;

 private:
  struct Trace {
    std::vector<Vector> hidden;  // hidden[0] is the initial context
    Vector output;
  };
  Trace run(std::span<const Vector> steps) const;

  std::size_t features_ = 0;
  SequenceMode mode_ = SequenceMode::SingleStep;
  LayerParams input_;
  Matrix recurrent_;
  LayerParams output_;
  Vector context_init_;
};

enum class NarxMode {
  PerRecord,  // every record is independent; all delay taps are zero
  Stream,     // ordered records; taps carry past inputs and past true targets
};

/// Nonlinear autoregressive network with exogenous inputs.
///
/// The network input is [x_t, x_{t-1} .. x_{t-du}, y_{t-1} .. y_{t-dy}] where
/// the y taps hold past targets (series-parallel / teacher forcing).
class NarxModel {
 public:
  NarxModel() = default;
  NarxModel(std::size_t features, std::size_t hidden, std::size_t outputs,
            std::size_t input_delays, std::size_t output_delays,
            NarxMode mode = NarxMode::PerRecord);
  static NarxModel initialized(std::size_t features, std::size_t hidden, std::size_t outputs,
                               std::size_t input_delays, std::size_t output_delays,
                               NarxMode mode, Rng& rng);

  std::size_t feature_count() const { return features_; }
  std::size_t input_delays() const { return input_delays_; }
  std::size_t output_delays() const { return output_delays_; }
  std::size_t output_size() const { return net_.output_size(); }
  std::size_t hidden_size() const { return net_.hidden_size(); }
  std::size_t tapped_width() const { return net_.input_size(); }
  NarxMode mode() const { return mode_; }

  const FfnnModel& network() const { return net_; }
  FfnnModel& network() { return net_; }

  /// Builds the tapped input. Past vectors are ordered most recent first;
  /// taps beyond what is supplied are zero.
  Vector assemble(std::span<const double> current, std::span<const Vector> past_inputs,
                  std::span<const Vector> past_targets) const;

  /// Forward pass on an already assembled input.
  Vector forward(std::span<const double> assembled) const { return net_.forward(assembled); }

  /// Independent record with zero taps. Throws ValidationError in stream mode.
  Vector predict(std::span<const double> features) const;
  Example make_example(std::span<const double> features, Vector target) const;

  struct StreamStep {
    Vector output;
    Vector residual;  // target - output
  };

  /// Teacher-forced examples for an ordered stream. Requires one target per row.
  std::vector<Example> stream_examples(std::span<const Vector> rows,
                                       std::span<const Vector> targets) const;
  std::vector<StreamStep> forward_stream(std::span<const Vector> rows,
                                         std::span<const Vector> targets) const;

  double loss(const Example& example) const { return net_.loss(example); }
  Gradient<NarxModel> gradient(const Example& example) const;

  NarxModel zeros_like() const;
  std::vector<std::span<double>> parameter_blocks() { return net_.parameter_blocks(); }
  std::vector<std::span<const double>> parameter_blocks() const {
    return net_.parameter_blocks();
  }

  bool operator==(const NarxModel&) const = default;

 private:
  FfnnModel net_;
  std::size_t features_ = 0;
  std::size_t input_delays_ = 0;
  std::size_t output_delays_ = 1;
  NarxMode mode_ = NarxMode::PerRecord;
};

enum class Family { Ffnn, Elman, Narx };
std::string_view family_name(Family family);
std::optional<Family> parse_family(std::string_view token);

using Network = std::variant<FfnnModel, ElmanModel, NarxModel>;
Family family_of(const Network& network);
std::size_t output_size(const Network& network);

enum class Stage { Diagnosis, Classification };
std::string_view stage_name(Stage stage);
std::optional<Stage> parse_stage(std::string_view token);

enum class OutputEncoding {
  Binary,   // one output, target 0 healthy / 1 anemic
  OneHot3,  // three outputs, one per subtype
  Banded1,  // one output, subtype targets 1/6, 1/2, 5/6
};
std::string_view encoding_name(OutputEncoding encoding);
std::optional<OutputEncoding> parse_encoding(std::string_view token);
std::size_t output_width(OutputEncoding encoding);

/// Network target for a label. Throws ValidationError when a non-anemic
/// label is used with a subtype encoding.
Vector encode_target(AnemiaLabel label, OutputEncoding encoding);

/// OneHot3: argmax with ties going to the lowest index. Banded1: nearest of
/// 1/6, 1/2, 5/6 with ties going to the lower band.
AnemiaLabel decode_subtype(std::span<const double> outputs, OutputEncoding encoding);

}  // namespace hemanet
