#pragma once

#include <stdexcept>
#include <string>

namespace airycov {

/// Invalid input: wrong sizes, non-finite values, violated preconditions.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the range where a routine is accurate.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Non-finite or overflowing intermediate quantities.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An adaptive loop hit its cap before meeting its tolerance.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double previous, double last)
      : NumericalError(what), previous_(previous), last_(last) {}

  double previous() const noexcept { return previous_; }
  double last() const noexcept { return last_; }

 private:
  double previous_;
  double last_;
};

}  // namespace airycov
