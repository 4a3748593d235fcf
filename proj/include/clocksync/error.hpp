#pragma once

#include <stdexcept>
#include <string>

namespace clocksync {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters, presets, flags or file contents.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a function (e.g. log of a non-positive
/// observation, empty series).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An internal invariant was violated (e.g. A_k >= 0 in the FGE recursion).
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// A numerical search could not bracket or evaluate its objective.
class SearchError : public Error {
 public:
  using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace clocksync
