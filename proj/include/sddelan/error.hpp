#ifndef SDDELAN_ERROR_HPP
#define SDDELAN_ERROR_HPP

#include <stdexcept>
#include <string>

namespace sddelan {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: invalid measure, grid, or configuration.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not produce a trustworthy answer.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace sddelan

#endif  // SDDELAN_ERROR_HPP
