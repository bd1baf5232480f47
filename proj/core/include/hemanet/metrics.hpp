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
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hemanet {

/// K x K counts; rows are truth, columns are prediction.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes);

  /// Throws std::out_of_range for class indices >= classes().
  void add(std::size_t truth, std::size_t predicted, std::uint64_t count = 1);

  std::size_t classes() const { return classes_; }
  std::uint64_t count(std::size_t truth, std::size_t predicted) const {
    return counts_[truth * classes_ + predicted];
  }
  std::uint64_t total() const;
  std::uint64_t correct() const;
  std::uint64_t truth_count(std::size_t c) const;
  std::uint64_t predicted_count(std::size_t c) const;

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::size_t classes_;
  std::vector<std::uint64_t> counts_;
};

ConfusionMatrix confusion_from_pairs(std::size_t classes,
                                     std::span<const std::pair<int, int>> truth_predicted);

/// trace / total. Throws std::domain_error on an empty matrix.
double accuracy(const ConfusionMatrix& cm);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  /// Set when some denominator was zero and the 0 convention was applied.
  bool degenerate = false;
};

/// 2 P R / (P + R), or 0 when P + R == 0.
double f1_score(double precision, double recall);

/// One-vs-rest metrics for `positive`. Throws std::domain_error on an empty matrix.
Prf precision_recall_f1(const ConfusionMatrix& cm, std::size_t positive);

/// Unweighted mean over the classes that occur in the truth or predictions.
Prf macro_average(const ConfusionMatrix& cm);

struct EvalRow {
  std::string name;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t n = 0;
  bool degenerate = false;
  std::vector<Prf> per_class;
  std::vector<std::uint64_t> support;
};

struct EvalReport {
  std::string title;
  std::vector<std::string> class_names;
  std::vector<EvalRow> rows;

  /// Aligned table, four decimals; degenerate rows are marked with '*'.
  std::string to_text() const;
  /// {"title", "models": [{name, accuracy, precision, recall, f1, n, ...}]}
  std::string to_json() const;
};

struct NamedMatrix {
  std::string name;
  ConfusionMatrix matrix;
};

/// One row per model in input order. Two-class matrices report class 1 as
/// the positive class; larger ones report the macro average.
EvalReport compare_report(std::span<const NamedMatrix> models,
                          std::vector<std::string> class_names = {}, std::string title = {});

}  // namespace hemanet
