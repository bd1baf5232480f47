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

#include <cstdint>
#include <string>
#include <string_view>

#include "hemanet/models.hpp"
#include "hemanet/preprocess.hpp"
#include "hemanet/train.hpp"

namespace hemanet {

inline constexpr int kModelFormatMajor = 1;
inline constexpr int kModelFormatMinor = 0;

struct TrainMeta {
  TrainConfig config;
  int epochs_run = 0;
  double final_train_loss = 0.0;
};

/// Everything needed to reproduce predictions: the network, its feature
/// selection and the normalizer fitted at training time.
struct ModelFile {
  Stage stage = Stage::Diagnosis;
  FeatureSpec features = FeatureSpec::full9();
  OutputEncoding encoding = OutputEncoding::Binary;
  Normalizer normalizer;
  Network network;
  TrainMeta meta;

  Family family() const { return family_of(network); }

  /// Normalized network input for one record.
  Vector prepare(const CbcRecord& record) const;
  /// Forward pass for an independent record. Throws ValidationError for
  /// stream-mode NARX models, which need labeled history.
  Vector predict(const CbcRecord& record) const;
};

/// Single JSON document, doubles printed so they parse back bit-identically.
std::string model_to_json(const ModelFile& model);
/// Throws FormatError on malformed JSON, missing fields, an unknown family
/// tag, inconsistent shapes, or a newer major format version.
ModelFile model_from_json(std::string_view text);

void save_model(const ModelFile& model, const std::string& path);
ModelFile load_model(const std::string& path);

}  // namespace hemanet
