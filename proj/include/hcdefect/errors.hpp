#pragma once

#include <stdexcept>
#include <string>

namespace hcd {

// Error taxonomy mirrors the CLI exit codes: config errors are user input
// problems, numeric errors are solver/evaluation failures at runtime.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class GeometryError : public std::runtime_error {
public:
  explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an evaluation lands inside the guard zone of a spectral pole.
class PoleProximityError : public NumericError {
public:
  PoleProximityError(const std::string& what, double pole)
      : NumericError(what), pole_(pole) {}
  double pole() const { return pole_; }

private:
  double pole_;
};

}  // namespace hcd
