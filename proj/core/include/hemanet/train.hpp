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

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hemanet/error.hpp"
#include "hemanet/nn.hpp"
#include "hemanet/random.hpp"

namespace hemanet {

enum class UpdateMode {
  FullBatch,  // one step per epoch on the mean gradient
  PerSample,  // one step per sample, reshuffled every epoch
};

struct TrainConfig {
  double learning_rate = 0.05;
  double momentum = 0.9;
  int epochs = 1000;
  UpdateMode mode = UpdateMode::FullBatch;
  std::size_t hidden = 50;
  std::uint64_t seed = 0;
  /// Stop after this many epochs without a validation-loss improvement and
  /// keep the best parameters. 0 disables early stopping.
  int patience = 0;

  /// Throws ValidationError unless lr > 0, 0 <= momentum < 1, epochs >= 1,
  /// hidden >= 1 and patience >= 0.
  void validate() const;
};

struct LossCurve {
  std::vector<double> train;
  std::vector<double> validation;

  std::size_t epochs() const { return train.size(); }
  /// "epoch,train_loss[,val_loss]" with one row per epoch, 17 significant digits.
  std::string to_csv() const;
};

template <class Model>
struct TrainResult {
  Model model;
  LossCurve curve;
  int best_epoch = 0;
};

namespace detail {

template <TrainableModel Model>
double mean_loss(const Model& model, std::span<const Example> examples) {
  double total = 0.0;
  for (const auto& ex : examples) total += model.loss(ex);
  return total / static_cast<double>(examples.size());
}

inline void check_finite(double loss, int epoch) {
  if (!std::isfinite(loss)) {
    throw NumericError("non-finite training loss at epoch " + std::to_string(epoch));
  }
}

}  // namespace detail

/// Trains `model` in place with gradient descent plus momentum on the mean
/// squared error. The loss recorded for an epoch is the mean training loss
/// seen while computing that epoch's gradients.
///
/// Throws ValidationError on empty training data or an invalid config and
/// NumericError when a loss becomes non-finite.
template <TrainableModel Model>
TrainResult<Model> train_loop(Model model, std::span<const Example> train,
                              std::span<const Example> validation, const TrainConfig& config) {
  config.validate();
  if (train.empty()) throw ValidationError("training data is empty");

  TrainResult<Model> result{model, {}, 0};
  Model velocity_store = model.zeros_like();
  auto params = result.model.parameter_blocks();
  auto velocity = velocity_store.parameter_blocks();

  Rng rng(derive_seed(config.seed, 0x5a));
  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  const auto n = static_cast<double>(train.size());
  double best_val = std::numeric_limits<double>::infinity();
  Model best_model = result.model;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    double epoch_loss = 0.0;
    if (config.mode == UpdateMode::FullBatch) {
      Model sum = result.model.zeros_like();
      auto sum_blocks = sum.parameter_blocks();
      for (const auto& ex : train) {
        const auto g = result.model.gradient(ex);
        add_scaled(sum_blocks, g.gradients.parameter_blocks(), 1.0);
        epoch_loss += g.loss;
      }
      detail::check_finite(epoch_loss, epoch);
      const auto& mean = std::as_const(sum).parameter_blocks();
      for (std::size_t b = 0; b < params.size(); ++b) {
        for (auto& v : sum_blocks[b]) v /= n;
        sgd_momentum_step(params[b], mean[b], velocity[b], config.learning_rate,
                          config.momentum);
      }
    } else {
      rng.shuffle(order);
      for (const auto i : order) {
        const auto g = result.model.gradient(train[i]);
        detail::check_finite(g.loss, epoch);
        epoch_loss += g.loss;
        const auto grads = g.gradients.parameter_blocks();
        for (std::size_t b = 0; b < params.size(); ++b) {
          sgd_momentum_step(params[b], grads[b], velocity[b], config.learning_rate,
                            config.momentum);
        }
      }
    }
    result.curve.train.push_back(epoch_loss / n);

    if (!validation.empty()) {
      const double val = detail::mean_loss(result.model, validation);
      detail::check_finite(val, epoch);
      result.curve.validation.push_back(val);
      if (config.patience > 0) {
        if (val < best_val) {
          best_val = val;
          best_model = result.model;
          result.best_epoch = epoch;
        } else if (epoch - result.best_epoch >= config.patience) {
          result.model = std::move(best_model);
          return result;
        }
      }
    }
  }
  if (config.patience > 0 && !validation.empty() && result.best_epoch > 0) {
    result.model = std::move(best_model);
  } else {
    result.best_epoch = config.epochs;
  }
  return result;
}

}  // namespace hemanet
