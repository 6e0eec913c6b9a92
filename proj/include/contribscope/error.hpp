#pragma once

#include <stdexcept>
#include <string>

namespace contribscope {

/// Malformed or inconsistent input data (maps to exit code 2 in the CLI).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or arguments (exit code 1).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Remote predictor could not be reached (exit code 3).
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace contribscope
