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

#include "hemanet/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

namespace hemanet {

ConfusionMatrix::ConfusionMatrix(std::size_t classes)
    : classes_(classes), counts_(classes * classes, 0) {
  if (classes < 2) throw std::invalid_argument("a confusion matrix needs at least two classes");
}

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted, std::uint64_t count) {
  if (truth >= classes_ || predicted >= classes_) {
    throw std::out_of_range("class index out of range for a " + std::to_string(classes_) +
                            "-class confusion matrix");
  }
  counts_[truth * classes_ + predicted] += count;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t t = 0;
  for (const auto c : counts_) t += c;
  return t;
}

std::uint64_t ConfusionMatrix::correct() const {
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < classes_; ++i) t += count(i, i);
  return t;
}

std::uint64_t ConfusionMatrix::truth_count(std::size_t c) const {
  std::uint64_t t = 0;
  for (std::size_t p = 0; p < classes_; ++p) t += count(c, p);
  return t;
}

std::uint64_t ConfusionMatrix::predicted_count(std::size_t c) const {
  std::uint64_t t = 0;
  for (std::size_t r = 0; r < classes_; ++r) t += count(r, c);
  return t;
}

ConfusionMatrix confusion_from_pairs(std::size_t classes,
                                     std::span<const std::pair<int, int>> truth_predicted) {
  ConfusionMatrix cm(classes);
  for (const auto& [t, p] : truth_predicted) {
    if (t < 0 || p < 0) throw std::out_of_range("negative class index");
    cm.add(static_cast<std::size_t>(t), static_cast<std::size_t>(p));
  }
  return cm;
}

double accuracy(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  if (total == 0) throw std::domain_error("accuracy of an empty confusion matrix");
  return static_cast<double>(cm.correct()) / static_cast<double>(total);
}

double f1_score(double precision, double recall) {
  const double sum = precision + recall;
  return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

Prf precision_recall_f1(const ConfusionMatrix& cm, std::size_t positive) {
  if (cm.total() == 0) throw std::domain_error("metrics of an empty confusion matrix");
  if (positive >= cm.classes()) throw std::out_of_range("positive class out of range");
  const auto tp = static_cast<double>(cm.count(positive, positive));
  const auto predicted = static_cast<double>(cm.predicted_count(positive));
  const auto actual = static_cast<double>(cm.truth_count(positive));
  Prf out;
  out.precision = predicted > 0.0 ? tp / predicted : 0.0;
  out.recall = actual > 0.0 ? tp / actual : 0.0;
  out.f1 = f1_score(out.precision, out.recall);
  out.degenerate = predicted == 0.0 || actual == 0.0 || out.precision + out.recall == 0.0;
  return out;
}

Prf macro_average(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw std::domain_error("metrics of an empty confusion matrix");
  Prf out;
  std::size_t used = 0;
  for (std::size_t c = 0; c < cm.classes(); ++c) {
    if (cm.truth_count(c) == 0 && cm.predicted_count(c) == 0) continue;
    const auto m = precision_recall_f1(cm, c);
    out.precision += m.precision;
    out.recall += m.recall;
    out.f1 += m.f1;
    out.degenerate = out.degenerate || m.degenerate;
    ++used;
  }
  out.precision /= static_cast<double>(used);
  out.recall /= static_cast<double>(used);
  out.f1 /= static_cast<double>(used);
  return out;
}

EvalReport compare_report(std::span<const NamedMatrix> models,
                          std::vector<std::string> class_names, std::string title) {
  EvalReport report;
  report.title = std::move(title);
  report.class_names = std::move(class_names);
  for (const auto& [name, cm] : models) {
    EvalRow row;
    row.name = name;
    row.n = cm.total();
    if (row.n == 0) {
      row.degenerate = true;
      report.rows.push_back(std::move(row));
      continue;
    }
    row.accuracy = accuracy(cm);
    const Prf headline = cm.classes() == 2 ? precision_recall_f1(cm, 1) : macro_average(cm);
    row.precision = headline.precision;
    row.recall = headline.recall;
    row.f1 = headline.f1;
    row.degenerate = headline.degenerate;
    for (std::size_t c = 0; c < cm.classes(); ++c) {
      row.per_class.push_back(precision_recall_f1(cm, c));
      row.support.push_back(cm.truth_count(c));
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string EvalReport::to_text() const {
  std::size_t width = 5;
  for (const auto& r : rows) width = std::max(width, r.name.size());
  std::string out;
  if (!title.empty()) out += title + "\n";
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s %6s %9s %9s %9s %9s\n", static_cast<int>(width), "model",
                "n", "accuracy", "precision", "recall", "f1");
  out += buf;
  bool any_degenerate = false;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-*s %6llu %9.4f %9.4f %9.4f %9.4f%s\n",
                  static_cast<int>(width), r.name.c_str(), static_cast<unsigned long long>(r.n),
                  r.accuracy, r.precision, r.recall, r.f1, r.degenerate ? " *" : "");
    out += buf;
    any_degenerate = any_degenerate || r.degenerate;
  }
  if (any_degenerate) out += "* a zero denominator occurred; the affected rate is reported as 0\n";
  return out;
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["title"] = title;
  j["models"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json m;
    m["name"] = r.name;
    m["accuracy"] = r.accuracy;
    m["precision"] = r.precision;
    m["recall"] = r.recall;
    m["f1"] = r.f1;
    m["n"] = r.n;
    m["degenerate"] = r.degenerate;
    nlohmann::ordered_json classes = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < r.per_class.size(); ++c) {
      nlohmann::ordered_json pc;
      pc["class"] = c < class_names.size() ? class_names[c] : std::to_string(c);
      pc["precision"] = r.per_class[c].precision;
      pc["recall"] = r.per_class[c].recall;
      pc["f1"] = r.per_class[c].f1;
      pc["support"] = r.support[c];
      classes.push_back(std::move(pc));
    }
    m["classes"] = std::move(classes);
    j["models"].push_back(std::move(m));
  }
  return j.dump(2) + "\n";
}

}  // namespace hemanet
