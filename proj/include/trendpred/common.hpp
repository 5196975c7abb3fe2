/*
 * Copyright 2026 The trendpred Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace trendpred {

using UserId = std::uint64_t;
using ItemId = std::uint64_t;
/// Integer day index counted from the dataset epoch.
using Day = std::int64_t;

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the 1-based line number of the offending line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A precondition on the arguments was violated by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// An operation received (or would produce) an empty collection it cannot work with.
class EmptyInputError : public Error {
 public:
  using Error::Error;
};

/// A day, window or parameter lies outside the admissible range.
class RangeError : public Error {
 public:
  using Error::Error;
};

}  // namespace trendpred
