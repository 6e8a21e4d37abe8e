// SPDX-License-Identifier: Apache-2.0

#ifndef MOFGCN_ERRORS_HPP
#define MOFGCN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mofgcn {

/// Invalid configuration, schema violation, or bad user input. CLI exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Non-finite values, divergence, or failed numeric contract. CLI exit code 3.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input file; message carries origin and line number.
struct ParseError : std::runtime_error {
  ParseError(const std::string& origin, std::size_t line, const std::string& msg)
      : std::runtime_error(origin + ":" + std::to_string(line) + ": " + msg),
        line_number(line) {}
  std::size_t line_number;
};

}  // namespace mofgcn

#endif  // MOFGCN_ERRORS_HPP
