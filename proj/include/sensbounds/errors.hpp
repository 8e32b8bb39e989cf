#pragma once

#include <stdexcept>
#include <string>

namespace sensbounds {

/// Malformed or out-of-domain input (bad probabilities, missing columns, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A covariate cell fails the overlap requirement (empty arm or p1 outside
/// [eps, 1 - eps]).
class OverlapError : public InputError {
 public:
  using InputError::InputError;
};

/// A computed result breaks one of the library's own guarantees.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace sensbounds
