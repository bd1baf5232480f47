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

#include "hemanet/matrix.hpp"

#include <string>

#include "hemanet/error.hpp"

namespace hemanet {

namespace {

void require(bool ok, const char* what, std::size_t expected, std::size_t got) {
  if (!ok) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(expected) +
                         ", got " + std::to_string(got));
  }
}

}  // namespace

Vector multiply(const Matrix& m, std::span<const double> x) {
  Vector y(m.rows(), 0.0);
  multiply_add(m, x, y);
  return y;
}

void multiply_add(const Matrix& m, std::span<const double> x, std::span<double> y) {
  require(x.size() == m.cols(), "matrix-vector input length", m.cols(), x.size());
  require(y.size() == m.rows(), "matrix-vector output length", m.rows(), y.size());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    double acc = 0.0;
    for (std::size_t c = 0; c < row.size(); ++c) acc += row[c] * x[c];
    y[r] += acc;
  }
}

Vector multiply_transposed(const Matrix& m, std::span<const double> x) {
  require(x.size() == m.rows(), "transposed matrix-vector input length", m.rows(), x.size());
  Vector y(m.cols(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) y[c] += row[c] * x[r];
  }
  return y;
}

void add_outer(Matrix& m, std::span<const double> a, std::span<const double> b) {
  require(a.size() == m.rows(), "outer product rows", m.rows(), a.size());
  require(b.size() == m.cols(), "outer product cols", m.cols(), b.size());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) += a[r] * b[c];
  }
}

}  // namespace hemanet
