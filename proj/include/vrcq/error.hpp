#pragma once

#include <stdexcept>
#include <string>

namespace vrcq {

/// Malformed model or argument (shape mismatch, bad probability, parameter out of range).
class ModelError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// An iterative numeric procedure failed to meet its tolerance.
class NumericError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Bad experiment configuration or CLI usage.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace vrcq
