#pragma once

#include <stdexcept>
#include <string>

namespace mf {

// Base of every error the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed files, dangling references, duplicate cells, bad parameters.
class InputError : public Error {
 public:
  using Error::Error;
};

// An operation was called on data that does not satisfy its precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A configured cell or search budget would be exceeded.
class BudgetError : public Error {
 public:
  using Error::Error;
};

// A construction that should be consistent is not (e.g. a seed that is not a deck map).
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace mf
