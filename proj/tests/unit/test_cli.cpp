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

#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <map>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "hemanet/csv.hpp"
#include "hemanet/model_file.hpp"
#include "hemanet/synth.hpp"
#include "support.hpp"

using namespace hemanet;
using hemanet::testing::slurp;
using hemanet::testing::TempDir;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run hemanet_cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// A diagnosis model that reproduces the hemoglobin rule exactly on records
// away from the threshold: inputs hgb and gender, shifted by the normalizer
// to hgb - 1 and gender - 1.
ModelFile rule_model() {
  ModelFile m;
  m.stage = Stage::Diagnosis;
  m.encoding = OutputEncoding::Binary;
  m.features = FeatureSpec::from_names({"hgb", "gender"});
  m.normalizer = Normalizer({0, 0}, {2, 2});
  LayerParams hidden(1, 2);
  hidden.weights(0, 0) = -40;
  hidden.weights(0, 1) = -40;
  hidden.biases[0] = 40 * 11;
  LayerParams output(1, 1);
  output.weights(0, 0) = 200;
  output.biases[0] = -100;
  m.network = FfnnModel(hidden, output);
  return m;
}

class ScopedEnv {
 public:
  ScopedEnv(const char* name, const std::string& value) : name_(name) { ::setenv(name, value.c_str(), 1); }
  ~ScopedEnv() { ::unsetenv(name_); }

 private:
  const char* name_;
};

}  // namespace

TEST_SUITE("cli synth") {
  TEST_CASE("exact class counts and byte-identical reruns") {
    TempDir dir;
    const auto args = std::vector<std::string>{"synth", "-n", "147", "--mix", "26,40,39,42",
                                               "--seed", "7", "--out", dir.file("a.csv")};
    REQUIRE(hemanet_cli(args).code == 0);
    auto again = args;
    again.back() = dir.file("b.csv");
    REQUIRE(hemanet_cli(again).code == 0);
    CHECK(slurp(dir.file("a.csv")) == slurp(dir.file("b.csv")));

    std::map<AnemiaLabel, int> counts;
    for (const auto& r : load_csv(dir.file("a.csv"))) ++counts[r.label];
    CHECK(counts[AnemiaLabel::Microcytic] == 26);
    CHECK(counts[AnemiaLabel::Normocytic] == 40);
    CHECK(counts[AnemiaLabel::Macrocytic] == 39);
    CHECK(counts[AnemiaLabel::NonAnemic] == 42);
  }

  TEST_CASE("stdout by default, global flags anywhere") {
    const auto a = hemanet_cli({"--seed", "3", "synth", "-n", "10"});
    const auto b = hemanet_cli({"synth", "-n", "10", "--seed", "3"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.rfind(kCsvHeader, 0) == 0);
  }

  TEST_CASE("usage errors") {
    const auto r = hemanet_cli({"synth", "-n", "10", "--mix", "1,2,3,5"});
    CHECK(r.code == 2);
    CHECK(r.err.find("sum") != std::string::npos);
    CHECK(hemanet_cli({"synth"}).code == 2);
    CHECK(hemanet_cli({}).code == 2);
    CHECK(hemanet_cli({"frobnicate"}).code == 2);
    CHECK(hemanet_cli({"synth", "-n", "4", "--mix", "1,1,2"}).code == 2);
    CHECK(hemanet_cli({"--help"}).code == 0);
  }

  TEST_CASE("reference ranges from the environment") {
    TempDir dir;
    hemanet::testing::spit(dir.file("r.json"), R"({"hgb_low_male": 15.0, "hgb_low_female": 14.0})");
    {
      ScopedEnv env("HEMANET_RANGES", dir.file("r.json"));
      REQUIRE(hemanet_cli({"synth", "-n", "200", "--seed", "2", "--out", dir.file("d.csv")}).code == 0);
    }
    ReferenceRanges rr;
    rr.hgb_low_male = 15.0;
    rr.hgb_low_female = 14.0;
    bool above_default = false;
    for (const auto& r : load_csv(dir.file("d.csv"))) {
      CHECK(rule_label(r.record, rr) == r.label);
      if (is_anemic(r.label) && r.record.hgb > 13.0) above_default = true;
    }
    CHECK(above_default);

    ScopedEnv bad("HEMANET_RANGES", dir.file("missing.json"));
    CHECK(hemanet_cli({"synth", "-n", "5"}).code == 3);
  }
}

TEST_SUITE("cli train and eval") {
  TEST_CASE("train writes a model and curve") {
    TempDir dir;
    REQUIRE(hemanet_cli({"synth", "-n", "120", "--seed", "1", "--out", dir.file("d.csv")}).code == 0);
    const auto r = hemanet_cli({"train", "--data", dir.file("d.csv"), "--family", "elman",
                                "--hidden", "100", "--epochs", "60", "--split", "40-40-20",
                                "--out", dir.file("m.json"), "--curve", dir.file("c.csv")});
    REQUIRE(r.code == 0);
    const auto model = load_model(dir.file("m.json"));
    CHECK(model.family() == Family::Elman);
    CHECK(std::get<ElmanModel>(model.network).hidden_size() == 100);
    CHECK(model.meta.config.hidden == 100);

    std::istringstream curve(slurp(dir.file("c.csv")));
    std::string line;
    std::getline(curve, line);
    CHECK(line == "epoch,train_loss,val_loss");
    std::vector<double> losses;
    while (std::getline(curve, line)) losses.push_back(std::stod(line.substr(line.find(',') + 1)));
    CHECK(losses.size() == 60);
    CHECK(losses.back() < losses.front());
  }

  TEST_CASE("train rejects bad input with the documented exit codes") {
    TempDir dir;
    REQUIRE(hemanet_cli({"synth", "-n", "30", "--out", dir.file("d.csv")}).code == 0);
    const auto base = std::vector<std::string>{"train", "--data", dir.file("d.csv"), "--out",
                                               dir.file("m.json")};
    auto with = [&](std::vector<std::string> extra) {
      auto a = base;
      a.insert(a.end(), extra.begin(), extra.end());
      return hemanet_cli(a).code;
    };
    CHECK(with({"--family", "lstm"}) == 2);
    CHECK(with({"--stage", "triage"}) == 2);
    CHECK(with({"--lr", "-1"}) == 2);
    CHECK(with({"--momentum", "1.5"}) == 2);
    CHECK(with({"--epochs", "0"}) == 2);
    CHECK(with({"--split", "10-10-80"}) == 2);
    CHECK(with({"--features", "paper9"}) == 2);
    CHECK(with({"--encoding", "binary"}) == 2);
    CHECK(hemanet_cli({"train", "--data", dir.file("none.csv"), "--out", dir.file("m.json")}).code == 3);

    hemanet::testing::spit(dir.file("bad.csv"), std::string(kCsvHeader) + "\n30,male,4,x,30,75,22,30,6,normocytic\n");
    const auto r = hemanet_cli({"train", "--data", dir.file("bad.csv"), "--out", dir.file("m.json")});
    CHECK(r.code == 3);
    CHECK(r.err.find("row 1") != std::string::npos);
    CHECK(hemanet_cli({"eval", "--model", dir.file("nothing.json"), "--data", dir.file("d.csv")}).code == 3);
  }

  TEST_CASE("a perfect predictor scores 1.0") {
    TempDir dir;
    REQUIRE(hemanet_cli({"synth", "-n", "200", "--seed", "4", "--out", dir.file("d.csv")}).code == 0);
    save_model(rule_model(), dir.file("rule.json"));
    const auto r = hemanet_cli({"--format", "json", "eval", "--model", dir.file("rule.json"),
                                "--data", dir.file("d.csv")});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["models"][0]["accuracy"].get<double>() == 1.0);
    CHECK(j["models"][0]["f1"].get<double>() == 1.0);
  }

  TEST_CASE("three-family eval keeps input order and JSON matches the table") {
    TempDir dir;
    REQUIRE(hemanet_cli({"synth", "-n", "100", "--seed", "5", "--out", dir.file("d.csv")}).code == 0);
    std::vector<std::string> args{"eval", "--data", dir.file("d.csv")};
    for (const std::string f : {"narx", "ffnn", "elman"}) {
      REQUIRE(hemanet_cli({"train", "--data", dir.file("d.csv"), "--family", f, "--epochs", "40",
                           "--hidden", "8", "--out", dir.file(f + ".json")}).code == 0);
      args.push_back("--model");
      args.push_back(dir.file(f + ".json"));
    }
    const auto text = hemanet_cli(args);
    args.insert(args.begin(), {"--format", "json"});
    const auto json = hemanet_cli(args);
    REQUIRE(text.code == 0);
    REQUIRE(json.code == 0);
    const auto j = nlohmann::json::parse(json.out);
    REQUIRE(j["models"].size() == 3);
    CHECK(j["models"][0]["name"] == "narx");
    CHECK(j["models"][1]["name"] == "ffnn");
    CHECK(j["models"][2]["name"] == "elman");
    for (const auto& m : j["models"]) {
      char row[128];
      std::snprintf(row, sizeof row, "%9.4f %9.4f %9.4f %9.4f", m["accuracy"].get<double>(),
                    m["precision"].get<double>(), m["recall"].get<double>(), m["f1"].get<double>());
      CHECK(text.out.find(row) != std::string::npos);
    }
  }
}

TEST_SUITE("cli predict") {
  TEST_CASE("reports in every format") {
    TempDir dir;
    REQUIRE(hemanet_cli({"synth", "-n", "80", "--seed", "6", "--out", dir.file("d.csv")}).code == 0);
    REQUIRE(hemanet_cli({"train", "--data", dir.file("d.csv"), "--epochs", "100", "--hidden", "8",
                         "--out", dir.file("diag.json")}).code == 0);
    REQUIRE(hemanet_cli({"train", "--data", dir.file("d.csv"), "--epochs", "100", "--hidden", "8",
                         "--stage", "classify", "--out", dir.file("cls.json")}).code == 0);
    const std::vector<std::string> args{"predict", "--diagnosis", dir.file("diag.json"),
                                        "--classify", dir.file("cls.json"), "--data",
                                        dir.file("d.csv")};
    auto with = [&](std::vector<std::string> pre) {
      pre.insert(pre.end(), args.begin(), args.end());
      return hemanet_cli(pre);
    };
    const auto a = with({"--deterministic"});
    const auto b = with({"--deterministic"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("created") == std::string::npos);
    CHECK(std::regex_search(a.out, std::regex(R"(#0: (NON-ANEMIC|ANEMIC \w+) \(p=\d\.\d\d\))")));
    CHECK(with({}).out.find("# created: ") != std::string::npos);

    const auto j = with({"--format", "json", "--deterministic"});
    REQUIRE(j.code == 0);
    CHECK(nlohmann::json::parse(j.out)["patients"].size() == 80);
    const auto csv = with({"--format", "csv"});
    CHECK(std::count(csv.out.begin(), csv.out.end(), '\n') == 81);

    CHECK(with({"--features", "paper7"}).code == 3);
    auto swapped = args;
    std::swap(swapped[2], swapped[4]);
    CHECK(hemanet_cli(swapped).code == 3);
  }
}

TEST_SUITE("cli gradcheck") {
  TEST_CASE("all families pass") {
    for (const std::string f : {"ffnn", "elman", "narx"}) {
      const auto r = hemanet_cli({"gradcheck", "--family", f});
      CHECK(r.code == 0);
      CHECK(r.out.find("FAIL") == std::string::npos);
    }
    CHECK(hemanet_cli({"gradcheck", "--family", "narx", "--epsilon", "1e-3", "--tolerance", "1e-3"}).code == 0);
  }

  TEST_CASE("failures and bad flags") {
    CHECK(hemanet_cli({"gradcheck", "--family", "rnn"}).code == 2);
    CHECK(hemanet_cli({"gradcheck", "--family", "ffnn", "--epsilon", "0.1"}).code == 2);
    CHECK(hemanet_cli({"gradcheck", "--family", "ffnn", "--tolerance", "1e-30"}).code == 4);
  }
}

TEST_SUITE("cli compare") {
  TEST_CASE("deterministic tables and curves") {
    TempDir dir;
    REQUIRE(hemanet_cli({"synth", "-n", "100", "--seed", "8", "--out", dir.file("d.csv")}).code == 0);
    auto run = [&](const std::string& tag) {
      return hemanet_cli({"compare", "--data", dir.file("d.csv"), "--seed", "8", "--epochs", "80",
                          "--hidden", "10", "--curves", dir.file("curves" + tag), "--models",
                          dir.file("models" + tag)});
    };
    const auto a = run("a");
    const auto b = run("b");
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    for (const std::string f : {"ffnn", "narx", "elman"}) {
      for (const std::string s : {"diagnosis", "classify"}) {
        const auto name = "/" + f + "_" + s + ".csv";
        CHECK(slurp(dir.file("curvesa") + name) == slurp(dir.file("curvesb") + name));
        CHECK_FALSE(slurp(dir.file("curvesa") + name).empty());
      }
    }
    CHECK(a.out.find("split: train 40, test 40, validation 20") != std::string::npos);

    const auto j = hemanet_cli({"--format", "json", "compare", "--data", dir.file("d.csv"),
                                "--seed", "8", "--epochs", "80", "--hidden", "10", "--sequential"});
    REQUIRE(j.code == 0);
    const auto doc = nlohmann::json::parse(j.out);
    REQUIRE(doc["diagnosis"]["models"].size() == 3);
    REQUIRE(doc["pipeline"]["models"].size() == 3);
    for (const auto& m : doc["diagnosis"]["models"]) {
      for (const char* key : {"accuracy", "precision", "recall", "f1"}) CHECK(m.contains(key));
    }
    // The sequential run reproduces the parallel one.
    const auto ffnn_acc = doc["pipeline"]["models"][0]["accuracy"].get<double>();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%9.4f", ffnn_acc);
    CHECK(a.out.find(buf) != std::string::npos);

    CHECK(hemanet_cli({"compare", "--data", dir.file("d.csv"), "--format", "csv"}).code == 2);
  }
}
