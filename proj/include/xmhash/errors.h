// Copyright 2026 The xmhash Authors.
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

#ifndef XMHASH_ERRORS_H_
#define XMHASH_ERRORS_H_

#include <stdexcept>
#include <string>

namespace xmh {

// Base for every error raised by the library. The CLI maps FormatError,
// ValidationError and IoError to exit code 2 and NumericalError to 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed file contents: bad magic, truncated payload, unknown section.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Inputs that violate a documented precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Data from which no meaningful model can be built (e.g. zero kernel width).
class DegenerateDataError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Failure of a dense solver or decomposition.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace xmh

#endif  // XMHASH_ERRORS_H_
