// Copyright 2026 The PHN Forecast Authors.
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

namespace phn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Qubit count, matrix size or sample count outside the supported range.
class SizeError : public Error {
  public:
    using Error::Error;
};

/// Wire or channel index out of range.
class IndexError : public Error {
  public:
    using Error::Error;
};

/// Array lengths or matrix shapes that do not match.
class ShapeError : public Error {
  public:
    using Error::Error;
};

/// Malformed circuit: trainable binding on a gate without a generator, bad
/// parameter indices.
class SpecError : public Error {
  public:
    using Error::Error;
};

/// Invalid user configuration.
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// Input data that cannot be ingested (CSV problems, missing artifacts).
class DataError : public Error {
  public:
    using Error::Error;
};

/// Non-finite values or numerically degenerate input.
class NumericError : public Error {
  public:
    using Error::Error;
};

} // namespace phn
