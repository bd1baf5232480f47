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

#include "hemanet/csv.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "hemanet/error.hpp"

namespace hemanet {

namespace {

constexpr std::array<const char*, 9> kRecordColumns = {"age", "gender", "rbc", "hgb", "hct",
                                                       "mcv", "mch",    "mchc", "wbc"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

[[noreturn]] void cell_error(std::size_t row, std::string_view column, std::string_view cell,
                             std::string_view what) {
  throw DataError("row " + std::to_string(row) + ", column " + std::string(column) + ": " +
                  std::string(what) + " '" + std::string(cell) + "'");
}

double parse_double(std::string_view cell, std::size_t row, std::string_view column) {
  double value = 0.0;
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  if (cell.empty() || ec != std::errc() || ptr != end) {
    cell_error(row, column, cell, "cannot parse number");
  }
  return value;
}

int parse_int(std::string_view cell, std::size_t row, std::string_view column) {
  int value = 0;
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  if (cell.empty() || ec != std::errc() || ptr != end) {
    cell_error(row, column, cell, "cannot parse integer");
  }
  return value;
}

struct Layout {
  std::array<std::size_t, 9> record{};
  std::optional<std::size_t> label;
  std::size_t width = 0;
};

Layout read_header(std::istream& in, bool need_label) {
  std::string line;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw DataError("missing CSV header");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  const auto names = split(line);
  Layout layout;
  layout.width = names.size();
  for (std::size_t k = 0; k < kRecordColumns.size(); ++k) {
    bool found = false;
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (lower(names[i]) == kRecordColumns[k]) {
        layout.record[k] = i;
        found = true;
        break;
      }
    }
    if (!found) throw DataError(std::string("missing column: ") + kRecordColumns[k]);
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (lower(names[i]) == "label") layout.label = i;
  }
  if (need_label && !layout.label) throw DataError("missing column: label");
  return layout;
}

CbcRecord parse_record(const std::vector<std::string_view>& cells, const Layout& layout,
                       std::size_t row) {
  auto cell = [&](std::size_t k) { return cells[layout.record[k]]; };
  CbcRecord r;
  r.age = parse_int(cell(0), row, kRecordColumns[0]);
  const auto gender = parse_gender(cell(1));
  if (!gender) cell_error(row, "gender", cell(1), "unknown gender");
  r.gender = *gender;
  double* analytes[] = {&r.rbc, &r.hgb, &r.hct, &r.mcv, &r.mch, &r.mchc, &r.wbc};
  for (std::size_t k = 2; k < kRecordColumns.size(); ++k) {
    *analytes[k - 2] = parse_double(cell(k), row, kRecordColumns[k]);
  }
  return r;
}

template <class Fn>
void for_each_row(std::istream& in, const Layout& layout, Fn&& fn) {
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto cells = split(line);
    if (cells.size() != layout.width) {
      throw DataError("row " + std::to_string(row) + ": expected " +
                      std::to_string(layout.width) + " cells, found " +
                      std::to_string(cells.size()));
    }
    fn(cells, row);
  }
}

std::string format6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void write_row(std::ostream& out, const CbcRecord& r) {
  out << r.age << ',' << gender_token(r.gender) << ',' << format6(r.rbc) << ','
      << format6(r.hgb) << ',' << format6(r.hct) << ',' << format6(r.mcv) << ','
      << format6(r.mch) << ',' << format6(r.mchc) << ',' << format6(r.wbc);
}

}  // namespace

double round_sig6(double value) {
  const auto text = format6(value);
  double out = 0.0;
  std::from_chars(text.data(), text.data() + text.size(), out);
  return out;
}

std::vector<LabeledRecord> read_labeled_csv(std::istream& in) {
  const auto layout = read_header(in, true);
  std::vector<LabeledRecord> out;
  for_each_row(in, layout, [&](const auto& cells, std::size_t row) {
    LabeledRecord lr;
    lr.record = parse_record(cells, layout, row);
    const auto token = cells[*layout.label];
    const auto label = parse_label(token);
    if (!label) cell_error(row, "label", token, "unknown label");
    lr.label = *label;
    out.push_back(lr);
  });
  return out;
}

std::vector<CbcRecord> read_records_csv(std::istream& in) {
  const auto layout = read_header(in, false);
  std::vector<CbcRecord> out;
  for_each_row(in, layout, [&](const auto& cells, std::size_t row) {
    out.push_back(parse_record(cells, layout, row));
  });
  return out;
}

std::vector<LabeledRecord> load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return read_labeled_csv(in);
}

std::vector<CbcRecord> load_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return read_records_csv(in);
}

void write_csv(std::ostream& out, const std::vector<LabeledRecord>& records) {
  out << kCsvHeader << '\n';
  for (const auto& lr : records) {
    write_row(out, lr.record);
    out << ',' << label_token(lr.label) << '\n';
  }
}

void write_records_csv(std::ostream& out, const std::vector<CbcRecord>& records) {
  out << kCsvHeaderUnlabeled << '\n';
  for (const auto& r : records) {
    write_row(out, r);
    out << '\n';
  }
}

void save_csv(const std::vector<LabeledRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  write_csv(out, records);
  if (!out) throw DataError("write failed: " + path);
}

}  // namespace hemanet
