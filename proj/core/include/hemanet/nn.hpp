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

#include <concepts>
#include <span>
#include <vector>

#include "hemanet/matrix.hpp"
#include "hemanet/random.hpp"

namespace hemanet {

/// Logistic function 1 / (1 + e^-x), evaluated without overflow.
double sigmoid(double x);
/// sigmoid(x) (1 - sigmoid(x)).
double sigmoid_prime(double x);

/// Weights (out x in) and biases (out) of one fully connected layer.
struct LayerParams {
  Matrix weights;
  Vector biases;

  LayerParams() = default;
  LayerParams(std::size_t out_dim, std::size_t in_dim)
      : weights(out_dim, in_dim), biases(out_dim, 0.0) {}

  /// Uniform on [-r, r] with r = sqrt(6 / (in + out)); biases start at zero.
  static LayerParams glorot(std::size_t out_dim, std::size_t in_dim, Rng& rng);

  std::size_t in_dim() const { return weights.cols(); }
  std::size_t out_dim() const { return weights.rows(); }

  bool operator==(const LayerParams&) const = default;
};

struct DenseOutput {
  Vector pre;         // W x + b
  Vector activation;  // sigmoid(pre)
};

/// Throws DimensionError when input length differs from in_dim.
DenseOutput forward_dense(const LayerParams& layer, std::span<const double> input);

/// Mean squared error (1/n) sum (pred - target)^2.
double mse_loss(std::span<const double> pred, std::span<const double> target);
/// (2/n) (pred - target).
Vector mse_grad(std::span<const double> pred, std::span<const double> target);

struct BackpropResult {
  std::vector<LayerParams> gradients;
  double loss = 0.0;
};

/// Reverse-mode gradients of mse_loss through a stack of sigmoid layers.
BackpropResult backprop(std::span<const LayerParams> network, std::span<const double> input,
                        std::span<const double> target);

/// Classical momentum: v <- mu v - lr g ; w <- w + v.
void sgd_momentum_step(std::span<double> params, std::span<const double> grads,
                       std::span<double> velocity, double learning_rate, double momentum);

/// One training or evaluation sample. Feedforward models read steps[0];
/// recurrent models consume the steps in order.
struct Example {
  std::vector<Vector> steps;
  Vector target;
};

/// Gradients are stored in a model of the same type and shape.
template <class Model>
struct Gradient {
  Model gradients;
  double loss = 0.0;
};

template <class M>
concept TrainableModel = requires(M m, const M cm, const Example& ex) {
  { cm.loss(ex) } -> std::convertible_to<double>;
  { cm.gradient(ex) } -> std::same_as<Gradient<M>>;
  { cm.zeros_like() } -> std::same_as<M>;
  { m.parameter_blocks() } -> std::same_as<std::vector<std::span<double>>>;
  { cm.parameter_blocks() } -> std::same_as<std::vector<std::span<const double>>>;
};

/// dst += scale * src, block by block. Throws DimensionError on shape mismatch.
void add_scaled(const std::vector<std::span<double>>& dst,
                const std::vector<std::span<const double>>& src, double scale);

}  // namespace hemanet
