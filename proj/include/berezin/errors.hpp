#pragma once

#include <stdexcept>
#include <string>

namespace berezin {

// Raised for invalid user-facing configuration: unknown type labels,
// non-dominant weights where dominance is required, malformed expressions.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when a computation exceeds a configured resource bound
// (PBW degree bound, representation dimension cap).
struct ResourceError : std::runtime_error {
  explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised by quantize() when the target function is not representable in the
// symbol algebra at the requested level; carries the level for diagnostics.
struct NotInAlgebraError : std::runtime_error {
  int level;
  double residual;
  NotInAlgebraError(int level_, double residual_, const std::string& msg)
      : std::runtime_error(msg), level(level_), residual(residual_) {}
};

}  // namespace berezin
