#pragma once

#include <stdexcept>
#include <string>

namespace lgt {

/// Caller misuse: bad arguments, unsupported combinations, malformed config.
/// Maps to CLI exit code 1.
struct usage_error : std::invalid_argument {
  explicit usage_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical breakdown: drift past tolerance, non-finite values, rejection
/// loops that do not terminate. Maps to CLI exit code 2.
struct numerical_error : std::runtime_error {
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lgt
