#pragma once

#include <stdexcept>
#include <string>

namespace eik {

// Raised when a requested table or sweep cell exceeds its configured size.
class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// Raised for malformed or inconsistent harness configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace eik
