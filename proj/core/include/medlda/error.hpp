#pragma once

#include <stdexcept>
#include <string>

namespace medlda {

// Bad input: malformed files, inconsistent shapes, out-of-range parameters.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical routine failed (non-convergence, factorization failure).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace medlda
