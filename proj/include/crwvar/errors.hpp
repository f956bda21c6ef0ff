#pragma once

#include <stdexcept>
#include <string>

namespace crwvar {

// Precondition violations throw std::invalid_argument. The three classes below
// carry the categories the command-line layer maps onto exit codes.

/// Malformed or insufficient input data (exit code 3).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A quantity is undefined for the given estimates, e.g. p_hat == 1 (exit code 4).
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid command-line usage or parameter combination (exit code 2).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace crwvar
