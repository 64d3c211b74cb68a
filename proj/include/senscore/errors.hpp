#pragma once

#include <stdexcept>
#include <string>

namespace senscore {

// Bad user-supplied data: dimension mismatches, invalid flags, malformed files.
// CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Request outside what the implementation supports (instance too large,
// unsupported family/exponent combination). CLI maps this to exit code 3.
class CapabilityError : public std::runtime_error {
 public:
  explicit CapabilityError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace senscore
