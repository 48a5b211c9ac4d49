#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dampwave {

// Error hierarchy shared by every module. All derive from std::runtime_error
// except InvalidArgument, so callers can still catch std::exception.

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Initial data that the spectral grid cannot represent. `parameter` names
// the offending field (e.g. "width", "k").
class ResolutionError : public std::runtime_error {
 public:
  ResolutionError(std::string parameter, const std::string& what)
      : std::runtime_error(what), parameter_(std::move(parameter)) {}
  const std::string& parameter() const noexcept { return parameter_; }

 private:
  std::string parameter_;
};

class IntegrationBlowup : public std::runtime_error {
 public:
  IntegrationBlowup(std::size_t step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A time integral was requested between instants that are not recorded.
class InterpolationNotAllowed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A bound was requested outside its hypotheses (e.g. t2 - t1 <= 2).
class HypothesisViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnderflowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dampwave
