#pragma once

#include <stdexcept>
#include <string>

namespace clutter {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument is outside the documented domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A user-supplied model failed a Bernstein/transform validation probe.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// A resource guard tripped (memory bound, truncation ceiling).
class GuardError : public Error {
 public:
  using Error::Error;
};

}  // namespace clutter
