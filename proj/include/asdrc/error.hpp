#pragma once

#include <stdexcept>
#include <string>

namespace asdrc {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument shapes, non-finite inputs, violated preconditions.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Iterative kernels that failed to meet their tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace asdrc
