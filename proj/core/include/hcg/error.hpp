#pragma once

#include <stdexcept>
#include <string>

namespace hcg {

// Shape disagreement between operands (reports both shapes in the message).
class DimensionError : public std::runtime_error {
public:
  explicit DimensionError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad value content: non-numeric cell, target row not one-hot, etc.
class ValueError : public std::runtime_error {
public:
  explicit ValueError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid configuration (unknown key, Nyquist violation, bad sizes).
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// File problems: missing path, truncated checkpoint, version mismatch.
class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values where finite ones are required (diverged training,
// oracle probe failures).
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace hcg
