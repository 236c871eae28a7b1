#pragma once

#include <stdexcept>
#include <string>

namespace qql {

/// Base class of every error raised by the library. The CLI maps any of
/// these to exit status 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of a function (e.g. x > N).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Objects from incompatible models were combined (wrong picture, wrong N,
/// mismatched dimensions).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// A constructed or loaded object violates its invariants.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numeric parameter is out of its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// The request would exceed a fixed enumeration or memory guard.
class CapacityError : public Error {
 public:
  using Error::Error;
};

}  // namespace qql
