// Copyright 2026 The bvspeed Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bvspeed {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration, profile or argument. CLI exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Instance cannot be placed on the requested layout. CLI exit code 3.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// A simulator size limit was exceeded. CLI exit code 4.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Parse failure in one of the line-oriented file formats.
class FormatError : public ConfigError {
 public:
  FormatError(const std::string& source, std::size_t line, const std::string& what)
      : ConfigError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace bvspeed
