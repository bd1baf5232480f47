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

#include "hemanet/nn.hpp"

#include <cmath>
#include <string>

#include "hemanet/error.hpp"

namespace hemanet {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double sigmoid_prime(double x) {
  const double s = sigmoid(x);
  return s * (1.0 - s);
}

LayerParams LayerParams::glorot(std::size_t out_dim, std::size_t in_dim, Rng& rng) {
  LayerParams layer(out_dim, in_dim);
  const double r = std::sqrt(6.0 / static_cast<double>(in_dim + out_dim));
  for (auto& w : layer.weights.values()) w = rng.uniform(-r, r);
  return layer;
}

DenseOutput forward_dense(const LayerParams& layer, std::span<const double> input) {
  if (input.size() != layer.in_dim()) {
    throw DimensionError("dense layer expects " + std::to_string(layer.in_dim()) +
                         " inputs, got " + std::to_string(input.size()));
  }
  DenseOutput out;
  out.pre = layer.biases;
  multiply_add(layer.weights, input, out.pre);
  out.activation.resize(out.pre.size());
  for (std::size_t i = 0; i < out.pre.size(); ++i) out.activation[i] = sigmoid(out.pre[i]);
  return out;
}

double mse_loss(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size() || pred.empty()) {
    throw DimensionError("mse_loss length mismatch: " + std::to_string(pred.size()) + " vs " +
                         std::to_string(target.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    sum += d * d;
  }
  return sum / static_cast<double>(pred.size());
}

Vector mse_grad(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size() || pred.empty()) {
    throw DimensionError("mse_grad length mismatch: " + std::to_string(pred.size()) + " vs " +
                         std::to_string(target.size()));
  }
  const double scale = 2.0 / static_cast<double>(pred.size());
  Vector g(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) g[i] = scale * (pred[i] - target[i]);
  return g;
}

BackpropResult backprop(std::span<const LayerParams> network, std::span<const double> input,
                        std::span<const double> target) {
  if (network.empty()) throw DimensionError("backprop on an empty network");
  // activations[k] is the input of layer k; activations.back() is the output.
  std::vector<Vector> activations;
  activations.reserve(network.size() + 1);
  activations.emplace_back(input.begin(), input.end());
  for (const auto& layer : network) {
    activations.push_back(forward_dense(layer, activations.back()).activation);
  }

  BackpropResult result;
  result.loss = mse_loss(activations.back(), target);
  result.gradients.reserve(network.size());
  for (const auto& layer : network) result.gradients.emplace_back(layer.out_dim(), layer.in_dim());

  Vector upstream = mse_grad(activations.back(), target);
  for (std::size_t k = network.size(); k-- > 0;) {
    const auto& a = activations[k + 1];
    Vector delta(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) delta[i] = upstream[i] * a[i] * (1.0 - a[i]);
    add_outer(result.gradients[k].weights, delta, activations[k]);
    result.gradients[k].biases = delta;
    if (k > 0) upstream = multiply_transposed(network[k].weights, delta);
  }
  return result;
}

void sgd_momentum_step(std::span<double> params, std::span<const double> grads,
                       std::span<double> velocity, double learning_rate, double momentum) {
  if (params.size() != grads.size() || params.size() != velocity.size()) {
    throw DimensionError("momentum step shape mismatch");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    velocity[i] = momentum * velocity[i] - learning_rate * grads[i];
    params[i] += velocity[i];
  }
}

void add_scaled(const std::vector<std::span<double>>& dst,
                const std::vector<std::span<const double>>& src, double scale) {
  if (dst.size() != src.size()) throw DimensionError("parameter block count mismatch");
  for (std::size_t b = 0; b < dst.size(); ++b) {
    if (dst[b].size() != src[b].size()) throw DimensionError("parameter block size mismatch");
    for (std::size_t i = 0; i < dst[b].size(); ++i) dst[b][i] += scale * src[b][i];
  }
}

}  // namespace hemanet
