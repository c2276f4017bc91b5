#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace genepy {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input (bad CSV, range violations, roster problems).
class InputError : public Error {
public:
  using Error::Error;
};

/// Entity/category map problems: conflicting rules, dangling ids.
class AlignmentError : public InputError {
public:
  using InputError::InputError;
};

/// A row or column with zero total score; the complexity quantities are undefined.
class DegenerateError : public Error {
public:
  DegenerateError(const std::string& what, std::string label)
      : Error(what), label_(std::move(label)) {}
  const std::string& label() const { return label_; }

private:
  std::string label_;
};

class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, double residual, std::size_t steps)
      : Error(what), residual_(residual), steps_(steps) {}
  double residual() const { return residual_; }
  std::size_t steps() const { return steps_; }

private:
  double residual_;
  std::size_t steps_;
};

}  // namespace genepy
