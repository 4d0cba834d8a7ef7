#pragma once

#include <stdexcept>
#include <string>

namespace cat0 {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document or configuration.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition was violated (bad point, disconnected graph, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not produce a certified answer.
class ComputationError : public Error {
 public:
  using Error::Error;
};

}  // namespace cat0
