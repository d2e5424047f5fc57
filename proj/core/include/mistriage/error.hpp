/*
 * Copyright 2026 The mistriage Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace mistriage {

// Base of every error raised by the library. Command handlers map these to
// exit codes; callers that only care about success can catch this type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class UnknownLabel : public Error {
 public:
  explicit UnknownLabel(std::string raw)
      : Error("unknown label: \"" + raw + "\""), raw_(std::move(raw)) {}
  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
};

class EmptyCorpus : public Error {
 public:
  EmptyCorpus() : Error("corpus is empty after cleaning") {}
};

class InsufficientClass : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

// Raised when an intermediate value in the model becomes NaN or infinite.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Artifact lineage check failed: a consumed file does not match the hash
// recorded by the artifact that references it.
class LineageError : public Error {
 public:
  using Error::Error;
};

}  // namespace mistriage
