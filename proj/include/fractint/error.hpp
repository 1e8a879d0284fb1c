#pragma once

#include <stdexcept>
#include <string>

namespace fractint {

// Base for every error raised by the library. Precondition violations,
// malformed files and exhausted budgets all derive from it so callers at the
// CLI boundary can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Requested radius or frequency lies below what the grid can resolve.
class ScaleError : public Error {
 public:
  using Error::Error;
};

// Work or memory would exceed a configured budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace fractint
