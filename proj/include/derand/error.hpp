/*
 * Copyright 2026 The derand Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
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

namespace derand {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A source, family or run was configured with values it cannot honor.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Derived family parameters are degenerate (e.g. the suffix level would be empty).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// An exhaustive oracle would exceed its enumeration budget. Oracles never fall back to sampling.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace derand
