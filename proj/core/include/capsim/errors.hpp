#pragma once

#include <stdexcept>
#include <string>

namespace capsim {

// Invalid configuration or inputs that violate a documented precondition.
// The CLI maps this to exit code 2; everything else that escapes maps to 1.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace capsim
