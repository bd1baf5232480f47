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

#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hemanet/csv.hpp"
#include "hemanet/gradcheck_suite.hpp"
#include "hemanet/model_file.hpp"
#include "hemanet/pipeline.hpp"
#include "hemanet/synth.hpp"

namespace hemanet::cli {

namespace {

// Bad flag values discovered after parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalFlags {
  std::uint64_t seed = 0;
  std::string features = "full9";
  std::string format = "text";
  bool deterministic = false;
};

struct TrainFlags {
  std::size_t hidden = 50;
  double learning_rate = 0.05;
  double momentum = 0.9;
  int epochs = 1000;
  std::string update = "full-batch";
  int patience = 0;
  std::string encoding = "onehot3";
  std::string elman_mode = "single-step";
  double context_init = 0.5;
  std::string narx_mode = "per-record";
  std::size_t input_delays = 1;
  std::size_t output_delays = 1;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--hidden", hidden, "Hidden-layer width")->capture_default_str();
    cmd.add_option("--lr", learning_rate, "Learning rate")->capture_default_str();
    cmd.add_option("--momentum", momentum, "Momentum coefficient in [0, 1)")
        ->capture_default_str();
    cmd.add_option("--epochs", epochs, "Training epochs")->capture_default_str();
    cmd.add_option("--update", update, "full-batch | per-sample")->capture_default_str();
    cmd.add_option("--patience", patience, "Early-stop patience on validation loss (0 = off)")
        ->capture_default_str();
    cmd.add_option("--encoding", encoding, "Classification output encoding: onehot3 | banded1")
        ->capture_default_str();
    cmd.add_option("--elman-mode", elman_mode, "single-step | feature-sequence")
        ->capture_default_str();
    cmd.add_option("--context-init", context_init, "Initial Elman context value")
        ->capture_default_str();
    cmd.add_option("--narx-mode", narx_mode, "per-record | stream")->capture_default_str();
    cmd.add_option("--input-delays", input_delays, "NARX exogenous delay order")
        ->capture_default_str();
    cmd.add_option("--output-delays", output_delays, "NARX output delay order (>= 1)")
        ->capture_default_str();
  }

  TrainConfig config(std::uint64_t seed) const {
    TrainConfig c;
    c.hidden = hidden;
    c.learning_rate = learning_rate;
    c.momentum = momentum;
    c.epochs = epochs;
    c.patience = patience;
    c.seed = seed;
    if (update == "full-batch") {
      c.mode = UpdateMode::FullBatch;
    } else if (update == "per-sample") {
      c.mode = UpdateMode::PerSample;
    } else {
      throw UsageError("unknown --update mode: " + update);
    }
    try {
      c.validate();
    } catch (const ValidationError& e) {
      throw UsageError(e.what());
    }
    return c;
  }

  ModelOptions model(Family family, const FeatureSpec& features) const {
    ModelOptions m;
    m.family = family;
    m.features = features;
    const auto enc = parse_encoding(encoding);
    if (!enc || *enc == OutputEncoding::Binary) {
      throw UsageError("unknown --encoding: " + encoding);
    }
    m.classify_encoding = *enc;
    if (elman_mode == "single-step") {
      m.elman_mode = SequenceMode::SingleStep;
    } else if (elman_mode == "feature-sequence") {
      m.elman_mode = SequenceMode::FeatureSequence;
    } else {
      throw UsageError("unknown --elman-mode: " + elman_mode);
    }
    m.context_init = context_init;
    if (narx_mode == "per-record") {
      m.narx_mode = NarxMode::PerRecord;
    } else if (narx_mode == "stream") {
      m.narx_mode = NarxMode::Stream;
    } else {
      throw UsageError("unknown --narx-mode: " + narx_mode);
    }
    if (output_delays < 1) throw UsageError("--output-delays must be at least 1");
    m.input_delays = input_delays;
    m.output_delays = output_delays;
    return m;
  }
};

FeatureSpec features_flag(const GlobalFlags& g) {
  try {
    return FeatureSpec::preset(g.features);
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
}

ReportFormat format_flag(const GlobalFlags& g) {
  try {
    return parse_report_format(g.format);
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
}

Family family_flag(const std::string& token) {
  const auto f = parse_family(token);
  if (!f) throw UsageError("unknown family: " + token + " (expected ffnn, elman or narx)");
  return *f;
}

SplitFractions split_flag(const std::string& token) {
  try {
    return split_preset(token);
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
}

ReferenceRanges ranges_from_env() {
  const char* path = std::getenv("HEMANET_RANGES");
  if (path == nullptr || *path == '\0') return {};
  return load_ranges(path);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << text;
  if (!out) throw DataError("write failed: " + path);
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    write_file(path, text);
  }
}

std::vector<LabeledRecord> load_valid(const std::string& path) {
  auto data = load_csv(path);
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (const auto v = validate_record(data[i].record); !v.empty()) {
      throw DataError(path + ": row " + std::to_string(i + 1) + ": " + describe(v));
    }
  }
  return data;
}

std::string stem(const std::string& path) { return std::filesystem::path(path).stem().string(); }

std::string fmt(double v, const char* spec) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

// ---------------------------------------------------------------------------

struct SynthCmd {
  long long n = -1;
  std::vector<long long> mix;
  double margin = 0.05;
  std::string out_path;

  int run(const GlobalFlags& g, std::ostream& out) const {
    if (n < 0) throw UsageError("-n must be non-negative");
    ClassCounts counts;
    if (mix.empty()) {
      counts = scaled_reference_mix(n);
    } else {
      if (mix.size() != 4) {
        throw UsageError("--mix takes four counts: microcytic,normocytic,macrocytic,non_anemic");
      }
      counts = {{AnemiaLabel::Microcytic, mix[0]},
                {AnemiaLabel::Normocytic, mix[1]},
                {AnemiaLabel::Macrocytic, mix[2]},
                {AnemiaLabel::NonAnemic, mix[3]}};
      long long sum = 0;
      for (const auto c : mix) {
        if (c < 0) throw UsageError("--mix counts must be non-negative");
        sum += c;
      }
      if (sum != n) {
        throw UsageError("--mix counts sum to " + std::to_string(sum) + ", but -n is " +
                         std::to_string(n));
      }
    }
    SynthOptions options;
    options.ranges = ranges_from_env();
    options.seed = g.seed;
    options.margin = margin;
    const auto records = synth_generate(n, counts, options);
    std::ostringstream text;
    write_csv(text, records);
    emit(out_path, text.str(), out);
    return kOk;
  }
};

struct TrainCmd {
  std::string data;
  std::string family = "ffnn";
  std::string stage = "diagnosis";
  std::string split = "none";
  bool no_stratify = false;
  bool joint_scaling = false;
  std::string out_path;
  std::string curve_path;
  std::string split_prefix;
  TrainFlags flags;

  int run(const GlobalFlags& g, std::ostream& out) const {
    const Family fam = family_flag(family);
    const auto st = parse_stage(stage);
    if (!st) throw UsageError("unknown stage: " + stage + " (expected diagnosis or classify)");
    const auto features = features_flag(g);
    const auto config = flags.config(g.seed);
    const auto options = flags.model(fam, features);
    const std::optional<SplitFractions> fractions =
        split == "none" ? std::nullopt : std::optional(split_flag(split));

    const auto records = load_valid(data);
    std::vector<LabeledRecord> train = records;
    std::vector<LabeledRecord> validation;
    std::vector<LabeledRecord> extra;
    if (fractions) {
      auto parts = split_dataset(records, *fractions, g.seed, !no_stratify);
      if (!split_prefix.empty()) {
        save_csv(parts.train, split_prefix + "train.csv");
        save_csv(parts.test, split_prefix + "test.csv");
        save_csv(parts.validation, split_prefix + "validation.csv");
      }
      if (joint_scaling) extra = parts.test;
      train = std::move(parts.train);
      validation = std::move(parts.validation);
    }

    const auto result = train_stage(*st, options, config, train, validation, extra);
    save_model(result.model, out_path);
    if (!curve_path.empty()) write_file(curve_path, result.curve.to_csv());
    out << "trained " << family_name(fam) << " " << stage_name(*st) << " model: "
        << result.curve.epochs() << " epochs, train loss "
        << fmt(result.curve.train.front(), "%.6g") << " -> "
        << fmt(result.curve.train.back(), "%.6g") << "\n";
    return kOk;
  }
};

struct EvalCmd {
  std::vector<std::string> models;
  std::vector<std::string> pairs;
  std::string data;
  double threshold = 0.5;

  int run(const GlobalFlags& g, std::ostream& out) const {
    const auto format = format_flag(g);
    if (models.empty() && pairs.empty()) throw UsageError("give at least one --model or --pair");
    if (format == ReportFormat::Csv) throw UsageError("eval supports --format text or json");
    const auto records = load_valid(data);

    std::vector<NamedMatrix> rows;
    for (const auto& path : models) {
      const auto model = load_model(path);
      if (model.stage == Stage::Diagnosis) {
        rows.push_back({stem(path), evaluate_diagnosis(model, records, threshold)});
      } else {
        rows.push_back({stem(path), evaluate_classification(model, records)});
      }
    }
    for (const auto& pair : pairs) {
      const auto comma = pair.find(',');
      if (comma == std::string::npos) throw UsageError("--pair expects DIAGNOSIS,CLASSIFY");
      const std::string d = pair.substr(0, comma);
      const std::string c = pair.substr(comma + 1);
      PipelineOptions opts;
      opts.threshold = threshold;
      const auto cm = evaluate_pipeline({load_model(d), load_model(c)}, records, opts);
      rows.push_back({stem(d) + "+" + stem(c), cm});
    }
    const auto report = compare_report(rows, {}, "Evaluation on " + stem(data));
    out << (format == ReportFormat::Json ? report.to_json() : report.to_text());
    return kOk;
  }
};

struct PredictCmd {
  std::string diagnosis;
  std::string classification;
  std::string data;
  std::string out_path;
  double threshold = 0.5;

  int run(const GlobalFlags& g, bool features_given, std::ostream& out) const {
    const auto format = format_flag(g);
    PipelineOptions opts;
    opts.threshold = threshold;
    if (features_given) opts.expected_features = features_flag(g);
    const auto records = load_records_csv(data);
    PipelineModels models{load_model(diagnosis), load_model(classification)};
    const auto reports = run_pipeline(models, records, opts);
    ReportMeta meta;
    meta.model_files = {diagnosis, classification};
    meta.threshold = threshold;
    if (!g.deterministic) meta.created = utc_timestamp();
    emit(out_path, emit_reports(reports, meta, format), out);
    return kOk;
  }
};

struct GradcheckCmd {
  std::string family;
  double epsilon = 1e-5;
  std::size_t configurations = 20;
  double tolerance = 1e-4;

  int run(const GlobalFlags& g, std::ostream& out) const {
    const Family fam = family_flag(family);
    if (!(epsilon >= 1e-7 && epsilon <= 1e-3)) throw UsageError("--epsilon must be in [1e-7, 1e-3]");
    bool pass = true;
    for (const auto& variant : gradcheck_variants(fam)) {
      const auto s = run_gradcheck(variant, g.seed, configurations, epsilon);
      const bool ok = s.max_relative_error < tolerance;
      pass = pass && ok;
      out << variant.name() << ": max relative error " << fmt(s.max_relative_error, "%.3e")
          << ", max absolute error " << fmt(s.max_absolute_error, "%.3e") << " over " << s.configurations << " configurations (" << s.parameters
          << " parameters) " << (ok ? "PASS" : "FAIL") << "\n";
    }
    return pass ? kOk : kNumeric;
  }
};

struct CompareCmd {
  std::string data;
  std::string split = "40-40-20";
  bool no_stratify = false;
  bool joint_scaling = false;
  bool sequential = false;
  std::string curves_dir;
  std::string models_dir;
  TrainFlags flags;

  int run(const GlobalFlags& g, std::ostream& out) const {
    const auto format = format_flag(g);
    if (format == ReportFormat::Csv) throw UsageError("compare supports --format text or json");
    CompareOptions options;
    options.fractions = split_flag(split);
    options.stratified = !no_stratify;
    options.joint_scaling = joint_scaling;
    options.seed = g.seed;
    options.config = flags.config(g.seed);
    options.model = flags.model(Family::Ffnn, features_flag(g));
    options.parallel = !sequential;

    const auto records = load_valid(data);
    const auto result = run_comparison(records, options);

    for (const auto& run : result.runs) {
      const std::string name(family_name(run.family));
      if (!curves_dir.empty()) {
        std::filesystem::create_directories(curves_dir);
        write_file(curves_dir + "/" + name + "_diagnosis.csv", run.diagnosis.curve.to_csv());
        write_file(curves_dir + "/" + name + "_classify.csv", run.classification.curve.to_csv());
      }
      if (!models_dir.empty()) {
        std::filesystem::create_directories(models_dir);
        save_model(run.diagnosis.model, models_dir + "/" + name + "_diagnosis.json");
        save_model(run.classification.model, models_dir + "/" + name + "_classify.json");
      }
    }

    if (format == ReportFormat::Json) {
      nlohmann::ordered_json j;
      j["split"] = {{"train", result.split.train.size()},
                    {"test", result.split.test.size()},
                    {"validation", result.split.validation.size()}};
      j["diagnosis"] = nlohmann::ordered_json::parse(result.diagnosis_report.to_json());
      j["pipeline"] = nlohmann::ordered_json::parse(result.pipeline_report.to_json());
      out << j.dump(2) << "\n";
    } else {
      out << "split: train " << result.split.train.size() << ", test "
          << result.split.test.size() << ", validation " << result.split.validation.size()
          << "\n\n"
          << result.diagnosis_report.to_text() << "\n"
          << result.pipeline_report.to_text();
    }
    return kOk;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"hemanet: anemia diagnosis and classification with FFNN, Elman and NARX networks",
               "hemanet"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--seed", g.seed, "Seed for every random choice")->capture_default_str();
  auto* features_opt =
      app.add_option("--features", g.features, "Feature preset: full9 | paper7")
          ->capture_default_str();
  app.add_option("--format", g.format, "Output format: text | json | csv")->capture_default_str();
  app.add_flag("--deterministic", g.deterministic, "Suppress timestamps in outputs");

  SynthCmd synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a labeled synthetic CBC dataset");
  synth_cmd->add_option("-n", synth.n, "Number of records")->required();
  synth_cmd->add_option("--mix", synth.mix,
                        "Class counts microcytic,normocytic,macrocytic,non_anemic "
                        "(default: the reference 26:40:39:42 mix scaled to n)")
      ->delimiter(',');
  synth_cmd->add_option("--margin", synth.margin, "Threshold margin as a window fraction")
      ->capture_default_str();
  synth_cmd->add_option("--out", synth.out_path, "Output CSV (default: stdout)");

  TrainCmd train;
  auto* train_cmd = app.add_subcommand("train", "Train one stage network");
  train_cmd->add_option("--data", train.data, "Labeled CSV")->required();
  train_cmd->add_option("--family", train.family, "ffnn | elman | narx")->capture_default_str();
  train_cmd->add_option("--stage", train.stage, "diagnosis | classify")->capture_default_str();
  train_cmd->add_option("--split", train.split, "none | 40-40-20 | paper-materials")
      ->capture_default_str();
  train_cmd->add_flag("--no-stratify", train.no_stratify, "Split without stratification");
  train_cmd->add_flag("--joint-scaling", train.joint_scaling,
                      "Fit the normalizer on train and test parts together");
  train_cmd->add_option("--split-prefix", train.split_prefix,
                        "Also write PREFIXtrain.csv, PREFIXtest.csv, PREFIXvalidation.csv");
  train_cmd->add_option("--out", train.out_path, "Model file to write")->required();
  train_cmd->add_option("--curve", train.curve_path, "Loss curve CSV to write");
  train.flags.add_to(*train_cmd);

  EvalCmd eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate model files on labeled data");
  eval_cmd->add_option("--model", eval.models, "Stage model file (repeatable)");
  eval_cmd->add_option("--pair", eval.pairs, "DIAGNOSIS,CLASSIFY model pair (repeatable)")
      ->delimiter(';');
  eval_cmd->add_option("--data", eval.data, "Labeled CSV")->required();
  eval_cmd->add_option("--threshold", eval.threshold, "Diagnosis threshold")
      ->capture_default_str();

  PredictCmd predict;
  auto* predict_cmd = app.add_subcommand("predict", "Write patient reports for unlabeled data");
  predict_cmd->add_option("--diagnosis", predict.diagnosis, "Diagnosis model file")->required();
  predict_cmd->add_option("--classify", predict.classification, "Classification model file")
      ->required();
  predict_cmd->add_option("--data", predict.data, "CSV of records (label column ignored)")
      ->required();
  predict_cmd->add_option("--threshold", predict.threshold, "Diagnosis threshold")
      ->capture_default_str();
  predict_cmd->add_option("--out", predict.out_path, "Report file (default: stdout)");

  GradcheckCmd gradcheck;
  auto* gradcheck_cmd =
      app.add_subcommand("gradcheck", "Compare backprop against finite differences");
  gradcheck_cmd->add_option("--family", gradcheck.family, "ffnn | elman | narx")->required();
  gradcheck_cmd->add_option("--epsilon", gradcheck.epsilon, "Central-difference step")
      ->capture_default_str();
  gradcheck_cmd->add_option("--configs", gradcheck.configurations, "Random configurations")
      ->capture_default_str();
  gradcheck_cmd->add_option("--tolerance", gradcheck.tolerance, "Pass threshold")
      ->capture_default_str();

  CompareCmd compare;
  auto* compare_cmd =
      app.add_subcommand("compare", "Train and evaluate all three families on one split");
  compare_cmd->add_option("--data", compare.data, "Labeled CSV")->required();
  compare_cmd->add_option("--split", compare.split, "40-40-20 | paper-materials")
      ->capture_default_str();
  compare_cmd->add_flag("--no-stratify", compare.no_stratify, "Split without stratification");
  compare_cmd->add_flag("--joint-scaling", compare.joint_scaling,
                        "Fit normalizers on train and test parts together");
  compare_cmd->add_flag("--sequential", compare.sequential, "Train families one after another");
  compare_cmd->add_option("--curves", compare.curves_dir, "Directory for loss-curve CSVs");
  compare_cmd->add_option("--models", compare.models_dir, "Directory for trained model files");
  compare.flags.add_to(*compare_cmd);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*synth_cmd) return synth.run(g, out);
    if (*train_cmd) return train.run(g, out);
    if (*eval_cmd) return eval.run(g, out);
    if (*predict_cmd) return predict.run(g, features_opt->count() > 0, out);
    if (*gradcheck_cmd) return gradcheck.run(g, out);
    if (*compare_cmd) return compare.run(g, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const Error& e) {
    err << "data error: " << e.what() << "\n";
    return kData;
  } catch (const std::invalid_argument& e) {
    err << "data error: " << e.what() << "\n";
    return kData;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "data error: " << e.what() << "\n";
    return kData;
  }
  return kUsage;
}

}  // namespace hemanet::cli
