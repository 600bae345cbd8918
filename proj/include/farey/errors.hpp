#pragma once

#include <stdexcept>
#include <string>

namespace farey {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (x outside [0,1], x = 0 for a CF word, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class DivisionByZero : public DomainError {
 public:
  using DomainError::DomainError;
};

/// mu([0,b]) diverges.
class InfiniteMeasure : public Error {
 public:
  using Error::Error;
};

/// The Farey step sends the word [1] to 0, which has no continued-fraction word.
class TerminalPoint : public Error {
 public:
  using Error::Error;
};

class NoReturnWithinCap : public Error {
 public:
  using Error::Error;
};

/// A requested materialization or enumeration exceeds the configured bound.
class CapacityExceeded : public Error {
 public:
  using Error::Error;
};

/// Raised when a grid iterate flagged monotone comes out decreasing somewhere.
class MeshInadequate : public Error {
 public:
  using Error::Error;
};

class InsufficientTruncation : public Error {
 public:
  using Error::Error;
};

}  // namespace farey
