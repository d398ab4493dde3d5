#pragma once

#include <stdexcept>
#include <string>

namespace relayosc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed argument: non-finite entry, length mismatch, empty vector.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A SystemSpec that violates its own invariants (pole outside (0,1), ...).
class InvalidSpec : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Raw impulse-response data whose tail bound cannot meet the requested accuracy.
class TruncationError : public Error {
 public:
  using Error::Error;
};

class UndecidableError : public Error {
 public:
  using Error::Error;
};

class EnumerationLimitError : public Error {
 public:
  using Error::Error;
};

/// The analysis does not apply to this system (e.g. period bounds without delay).
class NotApplicableError : public Error {
 public:
  using Error::Error;
};

/// Unreadable or malformed spec / report document.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace relayosc
