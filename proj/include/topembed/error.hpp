#pragma once

#include <stdexcept>
#include <string>

namespace topembed {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unreadable input (files, JSON, CSV).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A precondition or structural contract of an operation does not hold.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// A construction step could not complete (retry budget, subdivision budget,
/// violated internal bound).
class PipelineError : public Error {
 public:
  using Error::Error;
};

}  // namespace topembed
