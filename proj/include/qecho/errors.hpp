#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qecho {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters, malformed config files, mismatched grids.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Rank deficiency, SVD failure, non-finite trained operators.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Adaptive integration failure; carries the time at which it occurred.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& msg, double time)
      : Error(msg), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

// Non-finite lifted state during prediction; carries the first bad step.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& msg, std::size_t step)
      : Error(msg), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace qecho
