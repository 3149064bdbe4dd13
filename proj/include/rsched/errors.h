#pragma once

#include <stdexcept>
#include <string>

namespace rsched {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidTaskError : public Error {
 public:
  using Error::Error;
};

class InvalidInstanceError : public Error {
 public:
  using Error::Error;
};

// A policy or caller tried to commit a task that is not alive.
class IllegalActionError : public Error {
 public:
  using Error::Error;
};

// A choice was requested from a state without alive tasks.
class NoActionError : public Error {
 public:
  using Error::Error;
};

// Exact computation refused because the instance exceeds a size guard.
class CapacityError : public Error {
 public:
  using Error::Error;
};

class UnsupportedPolicyError : public Error {
 public:
  using Error::Error;
};

class UnsupportedWeightsError : public Error {
 public:
  using Error::Error;
};

class DegenerateInstanceError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace rsched
