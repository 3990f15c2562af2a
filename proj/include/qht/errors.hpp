#pragma once

#include <stdexcept>
#include <string>

namespace qht {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand dimensions do not fit the operation.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// An input violates a documented invariant (Hermiticity, unitarity, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Inputs are individually valid but do not belong together.
class InconsistentInputError : public Error {
 public:
  using Error::Error;
};

class NotAStateError : public Error {
 public:
  using Error::Error;
};

class NumericalInconsistencyError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace qht
