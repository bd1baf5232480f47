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

#include <iosfwd>
#include <string>
#include <vector>

#include "hemanet/cbc.hpp"

namespace hemanet {

// Column order written by save_csv. Readers match columns by header name, so
// any order is accepted on input.
inline constexpr const char* kCsvHeader = "age,gender,rbc,hgb,hct,mcv,mch,mchc,wbc,label";
inline constexpr const char* kCsvHeaderUnlabeled = "age,gender,rbc,hgb,hct,mcv,mch,mchc,wbc";

/// Reads a labeled file. Throws DataError naming the row and column of the
/// first bad cell, a missing column, or an unknown label token.
std::vector<LabeledRecord> read_labeled_csv(std::istream& in);
std::vector<LabeledRecord> load_csv(const std::string& path);

/// Reads records only; a label column, if present, is ignored.
std::vector<CbcRecord> read_records_csv(std::istream& in);
std::vector<CbcRecord> load_records_csv(const std::string& path);

/// Writes numbers with 6 significant digits.
void write_csv(std::ostream& out, const std::vector<LabeledRecord>& records);
void save_csv(const std::vector<LabeledRecord>& records, const std::string& path);
void write_records_csv(std::ostream& out, const std::vector<CbcRecord>& records);

/// Rounds to the value that survives a 6-significant-digit text round trip.
double round_sig6(double value);

}  // namespace hemanet
