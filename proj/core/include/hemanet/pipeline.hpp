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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hemanet/cbc.hpp"
#include "hemanet/metrics.hpp"
#include "hemanet/model_file.hpp"

namespace hemanet {

struct DiagnosisResult {
  int verdict = 0;  // 0 healthy, 1 anemic
  double raw = 0.0;
  double threshold = 0.5;
};

/// verdict = 1 iff raw >= threshold.
DiagnosisResult threshold_verdict(double raw, double threshold);

struct ClassificationResult {
  AnemiaLabel subtype = AnemiaLabel::Normocytic;
  Vector raw;
};

struct PipelineOptions {
  double threshold = 0.5;
  /// When set, both models must have been trained on exactly these features.
  std::optional<FeatureSpec> expected_features;
  PlausibilityBounds bounds;
};

/// Runs the diagnosis network on one record. Throws ValidationError for an
/// invalid record or a feature-spec mismatch.
DiagnosisResult diagnose(const ModelFile& model, const CbcRecord& record,
                         const PipelineOptions& options = {});

/// Runs the classification network. Throws std::logic_error when called
/// with a healthy verdict.
ClassificationResult classify(const ModelFile& model, const CbcRecord& record,
                              const DiagnosisResult& diagnosis,
                              const PipelineOptions& options = {});

struct PipelineModels {
  ModelFile diagnosis;
  ModelFile classification;
};

struct PatientReport {
  std::size_t id = 0;
  std::optional<DiagnosisResult> diagnosis;
  std::optional<AnemiaLabel> subtype;  // present iff verdict == 1
  Vector classify_raw;
  std::string error;

  bool ok() const { return error.empty(); }
  /// NonAnemic for healthy verdicts, the subtype otherwise.
  std::optional<AnemiaLabel> predicted_label() const;
};

struct PipelineStats {
  std::size_t diagnosis_calls = 0;
  std::size_t classification_calls = 0;
};

/// Diagnoses every record and classifies the positives, preserving input
/// order. A failing record yields a report with `error` set; the rest of the
/// batch proceeds.
///
/// Stream-mode NARX models are fed teacher-forced history from `truth`,
/// which must then hold one label per record.
std::vector<PatientReport> run_pipeline(const PipelineModels& models,
                                        std::span<const CbcRecord> records,
                                        const PipelineOptions& options = {},
                                        std::span<const AnemiaLabel> truth = {},
                                        PipelineStats* stats = nullptr);

enum class ReportFormat { Text, Json, Csv };
/// Throws ValidationError for tokens other than text, json, csv.
ReportFormat parse_report_format(std::string_view token);

struct ReportMeta {
  std::vector<std::string> model_files;
  double threshold = 0.5;
  std::optional<std::string> created;  // omitted in deterministic mode
};

std::string emit_reports(std::span<const PatientReport> reports, const ReportMeta& meta,
                         ReportFormat format);

/// Current UTC time as ISO-8601.
std::string utc_timestamp();

// ---------------------------------------------------------------------------
// Training and evaluation helpers shared by the CLI and the test suites.

struct ModelOptions {
  Family family = Family::Ffnn;
  FeatureSpec features = FeatureSpec::full9();
  OutputEncoding classify_encoding = OutputEncoding::OneHot3;
  SequenceMode elman_mode = SequenceMode::SingleStep;
  double context_init = 0.5;
  NarxMode narx_mode = NarxMode::PerRecord;
  std::size_t input_delays = 1;
  std::size_t output_delays = 1;
};

struct StageResult {
  ModelFile model;
  LossCurve curve;
};

/// Fits the normalizer, builds examples and trains one stage network. The
/// classification stage only sees anemic records. `scaling_extra` records
/// join the training records when fitting the normalizer (joint scaling).
StageResult train_stage(Stage stage, const ModelOptions& options, const TrainConfig& config,
                        std::span<const LabeledRecord> train,
                        std::span<const LabeledRecord> validation = {},
                        std::span<const LabeledRecord> scaling_extra = {});

/// Two-class matrix of diagnosis verdicts against truth.
ConfusionMatrix evaluate_diagnosis(const ModelFile& model, std::span<const LabeledRecord> data,
                                   double threshold = 0.5);
/// Four-class matrix of classification-stage predictions on anemic records.
ConfusionMatrix evaluate_classification(const ModelFile& model,
                                        std::span<const LabeledRecord> data);
/// Four-class matrix of end-to-end pipeline labels. Records whose report
/// carries an error are skipped.
ConfusionMatrix evaluate_pipeline(const PipelineModels& models,
                                  std::span<const LabeledRecord> data,
                                  const PipelineOptions& options = {});

struct FamilyRun {
  Family family = Family::Ffnn;
  StageResult diagnosis;
  StageResult classification;
  ConfusionMatrix diagnosis_matrix{2};
  ConfusionMatrix pipeline_matrix{4};
};

struct CompareOptions {
  SplitFractions fractions;
  bool stratified = true;
  bool joint_scaling = false;
  std::uint64_t seed = 0;
  TrainConfig config;
  ModelOptions model;
  bool parallel = true;
};

struct ComparisonResult {
  DatasetSplit split;
  std::vector<FamilyRun> runs;  // ffnn, narx, elman
  EvalReport diagnosis_report;
  EvalReport pipeline_report;
};

/// Splits the data, trains both stages for every family and evaluates on the
/// test part. Parallel and sequential execution give identical results.
ComparisonResult run_comparison(std::span<const LabeledRecord> data, const CompareOptions& options);

}  // namespace hemanet
