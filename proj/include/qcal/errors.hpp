#pragma once

#include <stdexcept>
#include <string>

namespace qcal {

/// Invalid user-supplied parameters or inputs (maps to CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation that could not produce a trustworthy result
/// (singular system, non-convergence, orientation flip). CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qcal
