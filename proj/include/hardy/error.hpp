#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hardy {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: out-of-range parameters, violated preconditions.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed expression string. `position` is the 0-based byte offset.
class ParseError : public DomainError {
 public:
  ParseError(const std::string& msg, std::size_t position)
      : DomainError(msg + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Numerical failure (non-convergence, loss of integrability, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature ran out of depth; carries the worst panel.
class QuadratureError : public NumericalError {
 public:
  QuadratureError(const std::string& msg, double a, double b, double err)
      : NumericalError(msg + " (worst panel [" + std::to_string(a) + ", " +
                       std::to_string(b) + "], error " + std::to_string(err) +
                       ")"),
        a_(a),
        b_(b),
        err_(err) {}

  double panel_lo() const noexcept { return a_; }
  double panel_hi() const noexcept { return b_; }
  double panel_error() const noexcept { return err_; }

 private:
  double a_, b_, err_;
};

/// e^{-V} failed the integrability search.
class NonIntegrableError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace hardy
