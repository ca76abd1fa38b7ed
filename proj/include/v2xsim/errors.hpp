#pragma once

#include <stdexcept>
#include <string>

namespace v2x {

// Raised for invalid configuration; message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when a requested deployment cannot satisfy geometric constraints.
class DeploymentError : public std::runtime_error {
 public:
  explicit DeploymentError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace v2x
