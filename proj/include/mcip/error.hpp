#pragma once

#include <stdexcept>
#include <string>

namespace mcip {

/// Caller supplied something malformed: unknown label, overlapping sets,
/// a file that does not parse. Maps to CLI exit code 1.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// A computation could not produce a finite answer (singular matrix,
/// degenerate fit, non-convergence). Maps to CLI exit code 2.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mcip
