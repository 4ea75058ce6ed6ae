#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fde {

enum class ErrorKind {
  invalid_argument,
  out_of_domain,
  domain_error,
  parse_error,
  config_error,
  precondition,
  not_retarded,
  non_finite,
  hypotheses_violated,
  domain_exhausted,
  construction_unsound,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Evaluation left the region where the right-hand side (or an expression) is
/// defined: log of a nonpositive number, division by zero, a non-finite result.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(ErrorKind::domain_error, what) {}
};

/// Expression syntax error; position is a 0-based character offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(ErrorKind::parse_error,
              what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace fde
