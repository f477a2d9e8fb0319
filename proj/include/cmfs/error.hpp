#pragma once

#include <stdexcept>
#include <string>

namespace cmfs {

/// Malformed or unusable input data (parse failures, bad dataset contents).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical procedure failed (e.g. eigensolver did not converge).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cmfs
