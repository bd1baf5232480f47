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

#include "hemanet/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <future>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hemanet/error.hpp"

namespace hemanet {

namespace {

void check_features(const ModelFile& model, const PipelineOptions& options) {
  if (options.expected_features && *options.expected_features != model.features) {
    throw ValidationError("feature spec mismatch: model uses " + model.features.label() +
                          ", request expects " + options.expected_features->label());
  }
}

void check_record(const CbcRecord& record, const PipelineOptions& options) {
  if (const auto v = validate_record(record, options.bounds); !v.empty()) {
    throw ValidationError(describe(v));
  }
}

// Wraps one stage model. Stream-mode NARX models additionally keep the
// teacher-forced delay lines; every other model is stateless.
class StagePredictor {
 public:
  explicit StagePredictor(const ModelFile& model) : model_(model) {
    if (const auto* narx = std::get_if<NarxModel>(&model.network);
        narx != nullptr && narx->mode() == NarxMode::Stream) {
      narx_ = narx;
    }
  }

  bool needs_history() const { return narx_ != nullptr; }

  Vector predict(const CbcRecord& record) {
    if (narx_ == nullptr) return model_.predict(record);
    last_input_ = model_.prepare(record);
    return narx_->forward(narx_->assemble(last_input_, past_inputs_, past_targets_));
  }

  // Records the true target of the record passed to the last predict().
  void observe(Vector target) {
    if (narx_ == nullptr) return;
    push(past_inputs_, last_input_, narx_->input_delays());
    push(past_targets_, std::move(target), narx_->output_delays());
  }

 private:
  static void push(std::vector<Vector>& line, Vector v, std::size_t depth) {
    line.insert(line.begin(), std::move(v));
    if (line.size() > depth) line.resize(depth);
  }

  const ModelFile& model_;
  const NarxModel* narx_ = nullptr;
  Vector last_input_;
  std::vector<Vector> past_inputs_;
  std::vector<Vector> past_targets_;
};

Vector subtype_target_or_zero(AnemiaLabel truth, OutputEncoding encoding) {
  if (!is_anemic(truth)) return Vector(output_width(encoding), 0.0);
  return encode_target(truth, encoding);
}

std::string format_g(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string format_fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::vector<LabeledRecord> stage_records(Stage stage, std::span<const LabeledRecord> data) {
  std::vector<LabeledRecord> out;
  for (const auto& lr : data) {
    if (stage == Stage::Diagnosis || is_anemic(lr.label)) out.push_back(lr);
  }
  return out;
}

}  // namespace

DiagnosisResult threshold_verdict(double raw, double threshold) {
  return {raw >= threshold ? 1 : 0, raw, threshold};
}

DiagnosisResult diagnose(const ModelFile& model, const CbcRecord& record,
                         const PipelineOptions& options) {
  if (model.stage != Stage::Diagnosis || model.encoding != OutputEncoding::Binary) {
    throw ValidationError("diagnose() needs a diagnosis-stage model");
  }
  check_features(model, options);
  check_record(record, options);
  return threshold_verdict(model.predict(record).front(), options.threshold);
}

ClassificationResult classify(const ModelFile& model, const CbcRecord& record,
                              const DiagnosisResult& diagnosis, const PipelineOptions& options) {
  if (diagnosis.verdict != 1) {
    throw std::logic_error("classify() called for a record diagnosed as healthy");
  }
  if (model.stage != Stage::Classification) {
    throw ValidationError("classify() needs a classification-stage model");
  }
  check_features(model, options);
  check_record(record, options);
  ClassificationResult out;
  out.raw = model.predict(record);
  out.subtype = decode_subtype(out.raw, model.encoding);
  return out;
}

std::optional<AnemiaLabel> PatientReport::predicted_label() const {
  if (!ok() || !diagnosis) return std::nullopt;
  if (diagnosis->verdict == 0) return AnemiaLabel::NonAnemic;
  return subtype;
}

std::vector<PatientReport> run_pipeline(const PipelineModels& models,
                                        std::span<const CbcRecord> records,
                                        const PipelineOptions& options,
                                        std::span<const AnemiaLabel> truth,
                                        PipelineStats* stats) {
  if (models.diagnosis.stage != Stage::Diagnosis ||
      models.diagnosis.encoding != OutputEncoding::Binary) {
    throw ValidationError("first pipeline model must be a diagnosis-stage model");
  }
  if (models.classification.stage != Stage::Classification) {
    throw ValidationError("second pipeline model must be a classification-stage model");
  }
  check_features(models.diagnosis, options);
  check_features(models.classification, options);

  StagePredictor diag(models.diagnosis);
  StagePredictor cls(models.classification);
  if ((diag.needs_history() || cls.needs_history()) && truth.size() != records.size()) {
    throw ValidationError("stream-mode NARX models need one truth label per record");
  }

  std::vector<PatientReport> reports;
  reports.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    PatientReport report;
    report.id = i;
    try {
      check_record(records[i], options);
      const auto raw = diag.predict(records[i]);
      if (stats) ++stats->diagnosis_calls;
      report.diagnosis = threshold_verdict(raw.front(), options.threshold);
      if (diag.needs_history()) {
        diag.observe(encode_target(truth[i], OutputEncoding::Binary));
      }
      if (report.diagnosis->verdict == 1) {
        report.classify_raw = cls.predict(records[i]);
        if (stats) ++stats->classification_calls;
        report.subtype = decode_subtype(report.classify_raw, models.classification.encoding);
        if (cls.needs_history()) {
          cls.observe(subtype_target_or_zero(truth[i], models.classification.encoding));
        }
      }
    } catch (const Error& e) {
      report = PatientReport{};
      report.id = i;
      report.error = e.what();
    } catch (const std::invalid_argument& e) {
      report = PatientReport{};
      report.id = i;
      report.error = e.what();
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

ReportFormat parse_report_format(std::string_view token) {
  if (token == "text") return ReportFormat::Text;
  if (token == "json") return ReportFormat::Json;
  if (token == "csv") return ReportFormat::Csv;
  throw ValidationError("unknown report format: " + std::string(token));
}

std::string emit_reports(std::span<const PatientReport> reports, const ReportMeta& meta,
                         ReportFormat format) {
  std::string out;
  switch (format) {
    case ReportFormat::Text: {
      out += "# hemanet patient report\n";
      std::string files;
      for (const auto& f : meta.model_files) files += (files.empty() ? "" : ", ") + f;
      out += "# models: " + files + "\n";
      out += "# threshold: " + format_g(meta.threshold, 6) + "\n";
      if (meta.created) out += "# created: " + *meta.created + "\n";
      for (const auto& r : reports) {
        out += "#" + std::to_string(r.id) + ": ";
        if (!r.ok()) {
          out += "ERROR " + r.error + "\n";
        } else if (r.diagnosis->verdict == 0) {
          out += "NON-ANEMIC (p=" + format_fixed2(r.diagnosis->raw) + ")\n";
        } else {
          out += "ANEMIC " + std::string(label_token(*r.subtype)) +
                 " (p=" + format_fixed2(r.diagnosis->raw) + ")\n";
        }
      }
      break;
    }
    case ReportFormat::Csv: {
      out += "id,verdict,subtype,raw_diagnosis\n";
      for (const auto& r : reports) {
        out += std::to_string(r.id) + ",";
        if (!r.ok()) {
          out += "error,,\n";
          continue;
        }
        out += std::to_string(r.diagnosis->verdict) + ",";
        if (r.subtype) out += label_token(*r.subtype);
        out += "," + format_g(r.diagnosis->raw, 17) + "\n";
      }
      break;
    }
    case ReportFormat::Json: {
      nlohmann::ordered_json j;
      j["meta"]["model_files"] = meta.model_files;
      j["meta"]["threshold"] = meta.threshold;
      j["meta"]["created"] = meta.created ? nlohmann::ordered_json(*meta.created) : nullptr;
      j["patients"] = nlohmann::ordered_json::array();
      for (const auto& r : reports) {
        nlohmann::ordered_json p;
        p["id"] = r.id;
        if (!r.ok()) {
          p["error"] = r.error;
        } else {
          p["verdict"] = r.diagnosis->verdict;
          if (r.subtype) p["subtype"] = label_token(*r.subtype);
          p["raw"]["diagnosis"] = r.diagnosis->raw;
          if (!r.classify_raw.empty()) p["raw"]["classify"] = r.classify_raw;
        }
        j["patients"].push_back(std::move(p));
      }
      out = j.dump(2) + "\n";
      break;
    }
  }
  return out;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

StageResult train_stage(Stage stage, const ModelOptions& options, const TrainConfig& config,
                        std::span<const LabeledRecord> train,
                        std::span<const LabeledRecord> validation,
                        std::span<const LabeledRecord> scaling_extra) {
  config.validate();
  const auto train_set = stage_records(stage, train);
  const auto val_set = stage_records(stage, validation);
  if (train_set.empty()) {
    throw ValidationError(std::string("no training records for the ") +
                          std::string(stage_name(stage)) + " stage");
  }

  ModelFile model;
  model.stage = stage;
  model.features = options.features;
  model.encoding = stage == Stage::Diagnosis ? OutputEncoding::Binary : options.classify_encoding;
  if (stage == Stage::Classification && model.encoding == OutputEncoding::Binary) {
    throw ValidationError("classification stage needs onehot3 or banded1 encoding");
  }

  auto encode_all = [&](const std::vector<LabeledRecord>& set) {
    std::vector<Vector> rows;
    for (const auto& lr : set) rows.push_back(encode(lr.record, model.features));
    return rows;
  };
  auto raw_train = encode_all(train_set);
  auto fit_rows = raw_train;
  for (auto& row : encode_all(stage_records(stage, scaling_extra))) fit_rows.push_back(row);
  model.normalizer = fit_normalizer(fit_rows);

  auto normalized = [&](const std::vector<LabeledRecord>& set) {
    std::vector<Vector> rows;
    for (const auto& row : encode_all(set)) rows.push_back(model.normalizer.apply(row));
    return rows;
  };
  auto targets = [&](const std::vector<LabeledRecord>& set) {
    std::vector<Vector> out;
    for (const auto& lr : set) out.push_back(encode_target(lr.label, model.encoding));
    return out;
  };
  const auto x_train = normalized(train_set);
  const auto y_train = targets(train_set);
  const auto x_val = normalized(val_set);
  const auto y_val = targets(val_set);

  const std::size_t features = model.features.size();
  const std::size_t outputs = output_width(model.encoding);
  Rng rng(config.seed);

  StageResult result;
  auto fit = [&](auto net, auto make_examples) {
    const auto train_examples = make_examples(net, x_train, y_train);
    const auto val_examples = make_examples(net, x_val, y_val);
    auto trained = train_loop(std::move(net), train_examples, val_examples, config);
    model.network = std::move(trained.model);
    result.curve = std::move(trained.curve);
  };
  auto independent = [](const auto& net, const std::vector<Vector>& xs,
                        const std::vector<Vector>& ys) {
    std::vector<Example> out;
    for (std::size_t i = 0; i < xs.size(); ++i) out.push_back(net.make_example(xs[i], ys[i]));
    return out;
  };

  switch (options.family) {
    case Family::Ffnn:
      fit(FfnnModel::initialized(features, config.hidden, outputs, rng), independent);
      break;
    case Family::Elman:
      fit(ElmanModel::initialized(features, config.hidden, outputs, options.elman_mode,
                                  options.context_init, rng),
          independent);
      break;
    case Family::Narx: {
      auto net = NarxModel::initialized(features, config.hidden, outputs, options.input_delays,
                                        options.output_delays, options.narx_mode, rng);
      if (options.narx_mode == NarxMode::Stream) {
        fit(std::move(net), [](const NarxModel& m, const std::vector<Vector>& xs,
                               const std::vector<Vector>& ys) {
          return m.stream_examples(xs, ys);
        });
      } else {
        fit(std::move(net), independent);
      }
      break;
    }
  }

  model.meta.config = config;
  model.meta.epochs_run = static_cast<int>(result.curve.epochs());
  model.meta.final_train_loss = result.curve.train.empty() ? 0.0 : result.curve.train.back();
  result.model = std::move(model);
  return result;
}

ConfusionMatrix evaluate_diagnosis(const ModelFile& model, std::span<const LabeledRecord> data,
                                   double threshold) {
  ConfusionMatrix cm(2);
  StagePredictor predictor(model);
  for (const auto& lr : data) {
    const auto raw = predictor.predict(lr.record);
    predictor.observe(encode_target(lr.label, OutputEncoding::Binary));
    cm.add(static_cast<std::size_t>(diagnosis_of(lr.label)),
           static_cast<std::size_t>(threshold_verdict(raw.front(), threshold).verdict));
  }
  return cm;
}

ConfusionMatrix evaluate_classification(const ModelFile& model,
                                        std::span<const LabeledRecord> data) {
  ConfusionMatrix cm(4);
  StagePredictor predictor(model);
  for (const auto& lr : data) {
    if (!is_anemic(lr.label)) continue;
    const auto raw = predictor.predict(lr.record);
    predictor.observe(encode_target(lr.label, model.encoding));
    cm.add(static_cast<std::size_t>(label_index(lr.label)),
           static_cast<std::size_t>(label_index(decode_subtype(raw, model.encoding))));
  }
  return cm;
}

ConfusionMatrix evaluate_pipeline(const PipelineModels& models,
                                  std::span<const LabeledRecord> data,
                                  const PipelineOptions& options) {
  std::vector<CbcRecord> records;
  std::vector<AnemiaLabel> truth;
  for (const auto& lr : data) {
    records.push_back(lr.record);
    truth.push_back(lr.label);
  }
  const auto reports = run_pipeline(models, records, options, truth);
  ConfusionMatrix cm(4);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (const auto predicted = reports[i].predicted_label()) {
      cm.add(static_cast<std::size_t>(label_index(truth[i])),
             static_cast<std::size_t>(label_index(*predicted)));
    }
  }
  return cm;
}

ComparisonResult run_comparison(std::span<const LabeledRecord> data,
                                const CompareOptions& options) {
  ComparisonResult result;
  result.split = split_dataset(data, options.fractions, options.seed, options.stratified);
  const auto& split = result.split;

  const Family families[] = {Family::Ffnn, Family::Narx, Family::Elman};
  auto run_family = [&](std::size_t k) {
    FamilyRun run;
    run.family = families[k];
    ModelOptions mo = options.model;
    mo.family = run.family;
    std::span<const LabeledRecord> extra;
    if (options.joint_scaling) extra = split.test;

    TrainConfig diag_config = options.config;
    diag_config.seed = derive_seed(options.seed, 2 * k + 1);
    TrainConfig cls_config = options.config;
    cls_config.seed = derive_seed(options.seed, 2 * k + 2);

    run.diagnosis =
        train_stage(Stage::Diagnosis, mo, diag_config, split.train, split.validation, extra);
    run.classification =
        train_stage(Stage::Classification, mo, cls_config, split.train, split.validation, extra);
    run.diagnosis_matrix = evaluate_diagnosis(run.diagnosis.model, split.test);
    run.pipeline_matrix =
        evaluate_pipeline({run.diagnosis.model, run.classification.model}, split.test);
    return run;
  };

  if (options.parallel) {
    std::vector<std::future<FamilyRun>> jobs;
    for (std::size_t k = 0; k < 3; ++k) {
      jobs.push_back(std::async(std::launch::async, run_family, k));
    }
    for (auto& job : jobs) result.runs.push_back(job.get());
  } else {
    for (std::size_t k = 0; k < 3; ++k) result.runs.push_back(run_family(k));
  }

  std::vector<NamedMatrix> diag;
  std::vector<NamedMatrix> pipe;
  for (const auto& run : result.runs) {
    diag.push_back({std::string(family_name(run.family)), run.diagnosis_matrix});
    pipe.push_back({std::string(family_name(run.family)), run.pipeline_matrix});
  }
  result.diagnosis_report = compare_report(diag, {"non_anemic", "anemic"},
                                           "Diagnosis on the test split (anemic = positive)");
  std::vector<std::string> names;
  for (const auto label : kAllLabels) names.emplace_back(label_token(label));
  result.pipeline_report =
      compare_report(pipe, names, "Four-way pipeline on the test split (macro-averaged)");
  return result;
}

}  // namespace hemanet
