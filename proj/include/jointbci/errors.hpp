// Copyright 2026 The jointbci Authors
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

#ifndef JOINTBCI_ERRORS_HPP
#define JOINTBCI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace jointbci {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or configuration value. The message names the
/// offending parameter/field. CLI exit code 2.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data (file format, shape mismatch,
/// non-finite payload). CLI exit code 3.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Numerically degenerate input: zero-signal trial, all-zero weights,
/// rank-deficient covariance, absorbing Markov chain, and the like.
/// CLI exit code 4.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

}  // namespace jointbci

#endif  // JOINTBCI_ERRORS_HPP
