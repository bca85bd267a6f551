#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace domkl {

/// Invalid argument, dimension mismatch or out-of-range parameter.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite input or a singular system.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver ran out of iterations.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_gradient_norm)
      : std::runtime_error(what), last_gradient_norm_(last_gradient_norm) {}
  double last_gradient_norm() const noexcept { return last_gradient_norm_; }

 private:
  double last_gradient_norm_;
};

/// Connected Erdos-Renyi rejection sampling gave up.
class SamplingError : public std::runtime_error {
 public:
  SamplingError(const std::string& what, std::size_t attempts)
      : std::runtime_error(what), attempts_(attempts) {}
  std::size_t attempts() const noexcept { return attempts_; }

 private:
  std::size_t attempts_;
};

/// Message passing requested on a graph with cycles.
class ApplicabilityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Exchanges received by a learner do not match its neighbor set.
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file; carries a 1-based location when known (0 = unknown).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column = 0)
      : std::runtime_error(what), line_(line), column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace domkl

namespace domkl {

/// A trial of a multi-trial experiment failed; wraps the original message.
class TrialError : public std::runtime_error {
 public:
  TrialError(std::size_t trial, const std::string& what)
      : std::runtime_error("trial " + std::to_string(trial) + ": " + what), trial_(trial) {}
  std::size_t trial() const noexcept { return trial_; }

 private:
  std::size_t trial_;
};

}  // namespace domkl
