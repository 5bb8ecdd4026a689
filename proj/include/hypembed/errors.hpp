#pragma once

#include <stdexcept>
#include <string>

namespace hypembed {

// Malformed or out-of-contract input (bad file, invalid parameter, graph
// that violates a precondition).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation that could not be completed at the requested accuracy
// (non-convergence, precision underflow, non-finite values).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when the working precision cannot represent an embedding.
class PrecisionError : public NumericalError {
 public:
  PrecisionError(const std::string& what, int required_bits)
      : NumericalError(what), required_bits_(required_bits) {}
  int required_bits() const noexcept { return required_bits_; }

 private:
  int required_bits_;
};

}  // namespace hypembed
