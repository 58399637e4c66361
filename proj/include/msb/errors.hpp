// errors.hpp - exception types shared by every module
#pragma once

#include <stdexcept>
#include <string>

namespace msb {

// Malformed or inconsistent model/config input (exit code 2 in the CLI).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, std::string pointer = "")
      : std::runtime_error(pointer.empty() ? what : pointer + ": " + what), pointer_(std::move(pointer)) {}

  // JSON pointer of the offending field, empty when not tied to a file.
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

// An argument outside an operation's precondition (real z, nonpositive cutoff, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operator violates a block structure it is required to have.
class StructureError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A factorization broke down (exit code 3 in the CLI).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace msb
