#pragma once

#include <stdexcept>
#include <string>

namespace smate {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FieldError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public FieldError {
 public:
  using FieldError::FieldError;
};

class DimensionError : public FieldError {
 public:
  using FieldError::FieldError;
};

class PlanError : public Error {
 public:
  using Error::Error;
};

class CodecError : public Error {
 public:
  using Error::Error;
};

class SimulationError : public Error {
 public:
  using Error::Error;
};

}  // namespace smate
