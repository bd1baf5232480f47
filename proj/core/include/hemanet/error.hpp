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

#include <stdexcept>
#include <string>

namespace hemanet {

/// Base class for every recoverable error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A record, configuration or argument failed validation.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An input data file could not be read or parsed.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A model file is malformed, truncated or from an unsupported version.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Training or evaluation produced a non-finite value.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Vector or matrix shapes do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace hemanet
