#pragma once

#include <stdexcept>
#include <string>

namespace gdlab {

// Malformed configuration or invalid user input. Maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A computation degenerated: NaN state, non-convergence, disconnected
// umbrella windows. Maps to exit code 3.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace gdlab
