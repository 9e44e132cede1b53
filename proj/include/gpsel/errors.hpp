#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gpsel {

// Bad configuration or structurally invalid input (CLI exit code 2).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Kernel-grammar syntax error; offset is the byte position in the input text.
struct ParseError : ConfigError {
  ParseError(const std::string& msg, std::size_t offset)
      : ConfigError(msg + " (offset " + std::to_string(offset) + ")"),
        offset(offset) {}
  std::size_t offset;
};

// Malformed data file; line is 1-based.
struct DataError : ConfigError {
  DataError(const std::string& msg, std::size_t line)
      : ConfigError(msg + " (line " + std::to_string(line) + ")"), line(line) {}
  std::size_t line;
};

// Numerical failure: non-PSD Gram matrix after jitter escalation, all
// optimizer restarts failed, non-finite second differences... (CLI exit 3).
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gpsel
