#pragma once

#include <stdexcept>
#include <string>

namespace indi {

/// A caller broke a documented precondition (bad dimension, non-finite input, ...).
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

/// Attitude inside the gimbal region where Euler extraction is undefined.
class SingularAttitude : public std::runtime_error {
 public:
  explicit SingularAttitude(const std::string& what) : std::runtime_error(what) {}
};

/// A matrix that must be inverted is singular or too ill-conditioned to trust.
class SingularInversion : public std::runtime_error {
 public:
  explicit SingularInversion(const std::string& what) : std::runtime_error(what) {}
};

/// Scenario/config text could not be parsed or failed validation.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Simulation state went non-finite.
class NumericFailure : public std::runtime_error {
 public:
  explicit NumericFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace indi
