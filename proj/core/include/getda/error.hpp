// Copyright 2026 The getda Authors.
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

#ifndef GETDA_ERROR_HPP_
#define GETDA_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace getda {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments: shape mismatch, non-finite values, out-of-range
// hyperparameters.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A zero-norm vector reached an operation that normalizes or takes a cosine.
class DegenerateVector : public Error {
 public:
  using Error::Error;
};

// Prototype initialization received zero, duplicate or missing class vectors.
class DegenerateInit : public Error {
 public:
  using Error::Error;
};

// An operation was called in the wrong lifecycle state (e.g. backward
// without a cached forward pass).
class StateError : public Error {
 public:
  using Error::Error;
};

// A loss or gradient became non-finite during optimization.
class TrainingDiverged : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace getda

#endif  // GETDA_ERROR_HPP_
