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

#include "hemanet/model_file.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hemanet/error.hpp"

namespace hemanet {

using nlohmann::ordered_json;

namespace {

ordered_json matrix_json(const Matrix& m) {
  ordered_json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["values"] = std::vector<double>(m.values().begin(), m.values().end());
  return j;
}

ordered_json layer_json(const char* name, const LayerParams& layer) {
  ordered_json j;
  j["name"] = name;
  j["rows"] = layer.weights.rows();
  j["cols"] = layer.weights.cols();
  j["weights"] = std::vector<double>(layer.weights.values().begin(), layer.weights.values().end());
  j["biases"] = layer.biases;
  return j;
}

template <class T>
T field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw FormatError(std::string("model file is missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError(std::string("model file field '") + key + "' has the wrong type");
  }
}

Matrix read_matrix(const nlohmann::json& j) {
  const auto rows = field<std::size_t>(j, "rows");
  const auto cols = field<std::size_t>(j, "cols");
  const auto values = field<std::vector<double>>(j, "values");
  if (values.size() != rows * cols) throw FormatError("matrix value count does not match shape");
  Matrix m(rows, cols);
  std::copy(values.begin(), values.end(), m.values().begin());
  return m;
}

LayerParams read_layer(const nlohmann::json& j, std::size_t rows, std::size_t cols) {
  const auto r = field<std::size_t>(j, "rows");
  const auto c = field<std::size_t>(j, "cols");
  if (r != rows || c != cols) {
    throw FormatError("layer '" + field<std::string>(j, "name") + "' has shape " +
                      std::to_string(r) + "x" + std::to_string(c) + ", expected " +
                      std::to_string(rows) + "x" + std::to_string(cols));
  }
  const auto weights = field<std::vector<double>>(j, "weights");
  auto biases = field<std::vector<double>>(j, "biases");
  if (weights.size() != rows * cols || biases.size() != rows) {
    throw FormatError("layer '" + field<std::string>(j, "name") + "' has inconsistent sizes");
  }
  LayerParams layer(rows, cols);
  std::copy(weights.begin(), weights.end(), layer.weights.values().begin());
  layer.biases = std::move(biases);
  return layer;
}

const char* sequence_token(SequenceMode m) {
  return m == SequenceMode::SingleStep ? "single-step" : "feature-sequence";
}
const char* narx_token(NarxMode m) { return m == NarxMode::PerRecord ? "per-record" : "stream"; }
const char* update_token(UpdateMode m) {
  return m == UpdateMode::FullBatch ? "full-batch" : "per-sample";
}

}  // namespace

Vector ModelFile::prepare(const CbcRecord& record) const {
  return normalizer.apply(encode(record, features));
}

Vector ModelFile::predict(const CbcRecord& record) const {
  const auto x = prepare(record);
  return std::visit([&](const auto& m) { return m.predict(x); }, network);
}

std::string model_to_json(const ModelFile& model) {
  ordered_json j;
  j["version"] = std::to_string(kModelFormatMajor) + "." + std::to_string(kModelFormatMinor);
  j["family"] = family_name(model.family());
  j["stage"] = stage_name(model.stage);
  j["feature_spec"] = model.features.names();
  j["output_encoding"] = encoding_name(model.encoding);
  j["normalizer"] = {{"min", model.normalizer.mins()}, {"max", model.normalizer.maxs()}};

  ordered_json layers = ordered_json::array();
  ordered_json recurrent = ordered_json::object();
  ordered_json delays = ordered_json::object();
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, FfnnModel>) {
          layers.push_back(layer_json("hidden", m.hidden()));
          layers.push_back(layer_json("output", m.output()));
        } else if constexpr (std::is_same_v<T, ElmanModel>) {
          layers.push_back(layer_json("hidden", m.input_layer()));
          layers.push_back(layer_json("output", m.output_layer()));
          recurrent["mode"] = sequence_token(m.mode());
          recurrent["context_init"] = m.context_init();
          recurrent["weights"] = matrix_json(m.recurrent());
        } else {
          layers.push_back(layer_json("hidden", m.network().hidden()));
          layers.push_back(layer_json("output", m.network().output()));
          delays["mode"] = narx_token(m.mode());
          delays["input_delays"] = m.input_delays();
          delays["output_delays"] = m.output_delays();
        }
      },
      model.network);
  j["layers"] = std::move(layers);
  j["recurrent"] = std::move(recurrent);
  j["delays"] = std::move(delays);

  const auto& c = model.meta.config;
  j["train_meta"] = {{"seed", c.seed},
                     {"learning_rate", c.learning_rate},
                     {"momentum", c.momentum},
                     {"epochs", c.epochs},
                     {"update_mode", update_token(c.mode)},
                     {"hidden", c.hidden},
                     {"patience", c.patience},
                     {"epochs_run", model.meta.epochs_run},
                     {"final_train_loss", model.meta.final_train_loss}};
  return j.dump(2) + "\n";
}

ModelFile model_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("corrupt model file: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("corrupt model file: top level is not an object");

  const auto version = field<std::string>(j, "version");
  int major = 0;
  int minor = 0;
  if (std::sscanf(version.c_str(), "%d.%d", &major, &minor) != 2) {
    throw FormatError("unreadable model format version '" + version + "'");
  }
  if (major > kModelFormatMajor) {
    throw FormatError("model format version " + version + " is newer than this build supports (" +
                      std::to_string(kModelFormatMajor) + ".x); upgrade hemanet to read it");
  }
  if (major < 1) throw FormatError("unsupported model format version " + version);

  ModelFile model;
  const auto family = parse_family(field<std::string>(j, "family"));
  if (!family) throw FormatError("unknown model family '" + field<std::string>(j, "family") + "'");
  const auto stage = parse_stage(field<std::string>(j, "stage"));
  if (!stage) throw FormatError("unknown stage '" + field<std::string>(j, "stage") + "'");
  model.stage = *stage;
  const auto encoding = parse_encoding(field<std::string>(j, "output_encoding"));
  if (!encoding) throw FormatError("unknown output encoding");
  model.encoding = *encoding;

  try {
    model.features = FeatureSpec::from_names(field<std::vector<std::string>>(j, "feature_spec"));
    const auto& norm = j.at("normalizer");
    model.normalizer = Normalizer(field<std::vector<double>>(norm, "min"),
                                  field<std::vector<double>>(norm, "max"));
  } catch (const ValidationError& e) {
    throw FormatError(std::string("invalid model file: ") + e.what());
  } catch (const nlohmann::json::exception&) {
    throw FormatError("model file is missing field 'normalizer'");
  }
  if (model.normalizer.size() != model.features.size()) {
    throw FormatError("normalizer width does not match the feature spec");
  }

  const auto layers = field<nlohmann::json>(j, "layers");
  if (!layers.is_array() || layers.size() != 2) throw FormatError("model must have two layers");
  const auto hidden = field<std::size_t>(layers[0], "rows");
  const auto outputs = output_width(model.encoding);
  const auto features = model.features.size();
  auto output_layer = read_layer(layers[1], outputs, hidden);

  switch (*family) {
    case Family::Ffnn:
      model.network = FfnnModel(read_layer(layers[0], hidden, features), std::move(output_layer));
      break;
    case Family::Elman: {
      const auto rec = field<nlohmann::json>(j, "recurrent");
      const auto mode_token = field<std::string>(rec, "mode");
      SequenceMode mode;
      if (mode_token == "single-step") {
        mode = SequenceMode::SingleStep;
      } else if (mode_token == "feature-sequence") {
        mode = SequenceMode::FeatureSequence;
      } else {
        throw FormatError("unknown Elman sequence mode '" + mode_token + "'");
      }
      ElmanModel m(features, hidden, outputs, mode, 0.0);
      m.input_layer() = read_layer(layers[0], hidden, m.step_width());
      m.output_layer() = std::move(output_layer);
      m.recurrent() = read_matrix(field<nlohmann::json>(rec, "weights"));
      m.context_init() = field<std::vector<double>>(rec, "context_init");
      if (m.recurrent().rows() != hidden || m.recurrent().cols() != hidden ||
          m.context_init().size() != hidden) {
        throw FormatError("recurrent weights or context do not match the hidden width");
      }
      model.network = std::move(m);
      break;
    }
    case Family::Narx: {
      const auto del = field<nlohmann::json>(j, "delays");
      const auto mode_token = field<std::string>(del, "mode");
      NarxMode mode;
      if (mode_token == "per-record") {
        mode = NarxMode::PerRecord;
      } else if (mode_token == "stream") {
        mode = NarxMode::Stream;
      } else {
        throw FormatError("unknown NARX mode '" + mode_token + "'");
      }
      const auto du = field<std::size_t>(del, "input_delays");
      const auto dy = field<std::size_t>(del, "output_delays");
      if (dy < 1) throw FormatError("NARX output delay order must be >= 1");
      NarxModel m(features, hidden, outputs, du, dy, mode);
      m.network() = FfnnModel(read_layer(layers[0], hidden, m.tapped_width()),
                              std::move(output_layer));
      model.network = std::move(m);
      break;
    }
  }

  if (j.contains("train_meta")) {
    const auto& meta = j.at("train_meta");
    auto& c = model.meta.config;
    c.seed = field<std::uint64_t>(meta, "seed");
    c.learning_rate = field<double>(meta, "learning_rate");
    c.momentum = field<double>(meta, "momentum");
    c.epochs = field<int>(meta, "epochs");
    c.mode = field<std::string>(meta, "update_mode") == "per-sample" ? UpdateMode::PerSample
                                                                     : UpdateMode::FullBatch;
    c.hidden = field<std::size_t>(meta, "hidden");
    c.patience = field<int>(meta, "patience");
    model.meta.epochs_run = field<int>(meta, "epochs_run");
    model.meta.final_train_loss = field<double>(meta, "final_train_loss");
  }
  return model;
}

void save_model(const ModelFile& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file " + path);
  out << model_to_json(model);
  if (!out) throw DataError("write failed: " + path);
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace hemanet
