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

#include "hemanet/train.hpp"

#include <cstdio>

namespace hemanet {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ValidationError("learning rate must be positive");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ValidationError("momentum must be in [0, 1)");
  if (epochs < 1) throw ValidationError("epochs must be at least 1");
  if (hidden < 1) throw ValidationError("hidden size must be at least 1");
  if (patience < 0) throw ValidationError("patience must be non-negative");
}

std::string LossCurve::to_csv() const {
  const bool with_val = !validation.empty();
  std::string out = with_val ? "epoch,train_loss,val_loss\n" : "epoch,train_loss\n";
  char buf[96];
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (with_val && i < validation.size()) {
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i + 1, train[i], validation[i]);
    } else {
      std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i + 1, train[i]);
    }
    out += buf;
  }
  return out;
}

}  // namespace hemanet
