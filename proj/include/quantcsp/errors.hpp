#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace quantcsp {

/// Base class of all recoverable errors raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A precondition of an operation was violated by the caller (mixing
/// quantales, non-canonical powers, alpha = +inf where forbidden, ...).
class ContractViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Raised when a hom set (or an iteration space) is larger than the
/// configured guard. Callers are expected to fall back to lazy evaluation.
class SizeExceeded : public Error {
public:
  SizeExceeded(boost::multiprecision::cpp_int required,
               boost::multiprecision::cpp_int limit)
      : Error("size " + required.str() + " exceeds limit " + limit.str()),
        required_(std::move(required)), limit_(std::move(limit)) {}

  const boost::multiprecision::cpp_int &required() const { return required_; }
  const boost::multiprecision::cpp_int &limit() const { return limit_; }

private:
  boost::multiprecision::cpp_int required_;
  boost::multiprecision::cpp_int limit_;
};

/// Domain/codomain mismatch when composing or comparing arrows.
class DomainMismatch : public Error {
public:
  using Error::Error;
};

/// Text input could not be parsed. Line and column are 1-based; 0 means
/// unknown.
class ParseError : public Error {
public:
  ParseError(const std::string &what, std::size_t line, std::size_t column)
      : Error(format(what, line, column)), line_(line), column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

private:
  static std::string format(const std::string &what, std::size_t line,
                            std::size_t column) {
    if (line == 0)
      return what;
    return "line " + std::to_string(line) + ", column " +
           std::to_string(column) + ": " + what;
  }

  std::size_t line_;
  std::size_t column_;
};

/// Structurally valid input that does not describe a legal object
/// (unknown labels, wrong arity, undeclared variables, ...).
class InputError : public Error {
public:
  using Error::Error;
};

/// A crisp relation has no preimage as a sublevel set of the language.
class NoPreimage : public Error {
public:
  using Error::Error;
};

} // namespace quantcsp
