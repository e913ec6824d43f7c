#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace decoherence {

/// Invalid input: bad dimensions, out-of-range parameters, malformed configs.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A Fock truncation too small to hold the requested state.
class TruncationError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

/// Violation of a physical parameter constraint (e.g. kaon positivity).
class ConstraintError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

/// Base for failures that occur while computing, on otherwise valid input.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PositivityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IntegrationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class StepFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class EnsembleFailure : public NumericalError {
 public:
  EnsembleFailure(std::size_t trajectory, double time, const std::string& what)
      : NumericalError("trajectory " + std::to_string(trajectory) + " failed at t=" +
                       std::to_string(time) + ": " + what),
        trajectory_(trajectory),
        time_(time) {}

  std::size_t trajectory() const noexcept { return trajectory_; }
  double time() const noexcept { return time_; }

 private:
  std::size_t trajectory_;
  double time_;
};

}  // namespace decoherence
