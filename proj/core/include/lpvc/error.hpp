// Copyright 2026 The LPVC Authors
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

namespace lpvc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed, truncated or inconsistent input data (files, bitstreams).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failures: missing files, unwritable paths.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Arguments that violate an operation's preconditions.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A configuration that does not match the data it is applied to,
/// e.g. a weight file trained for K=8 loaded into a K=4 run.
class ConfigMismatch : public Error {
 public:
  using Error::Error;
};

/// Training diverged (NaN or infinite loss).
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace lpvc
