// Copyright 2026 The NTWC Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace ntwc {

// Base for every error raised by the library. Callers that only need a
// message can catch this; the subclasses let the CLI pick an exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments to a pure function (e.g. frame length <= overlap).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Malformed or unsupported file contents (WAV, container, checkpoint).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Tensor shapes that disagree with the model architecture.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Entropy-coded payload ended early or contains an impossible code value.
class StreamError : public Error {
 public:
  using Error::Error;
};

// Container was produced by a different checkpoint.
class ModelMismatchError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf in a numeric pipeline (loss terms, quantizer input).
class NumericError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ntwc
