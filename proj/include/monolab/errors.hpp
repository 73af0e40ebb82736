#pragma once

#include <stdexcept>
#include <string>

namespace monolab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vectors living on different grids, or a vector of the wrong length.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An order relation required by a precondition does not hold (e.g. a ≰ b).
class OrderError : public Error {
 public:
  using Error::Error;
};

class GridError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Caller violated a documented precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Time stepping produced a non-finite value or the linear solve broke down.
class NumericalFailure : public Error {
 public:
  NumericalFailure(const std::string& what, double time, long step)
      : Error(what + " (t=" + std::to_string(time) + ", step=" + std::to_string(step) + ")"),
        time_(time),
        step_(step) {}

  double time() const noexcept { return time_; }
  long step() const noexcept { return step_; }

 private:
  double time_;
  long step_;
};

/// The state left the inflated trapping box.
class EscapeError : public Error {
 public:
  using Error::Error;
};

}  // namespace monolab
