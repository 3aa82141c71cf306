#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tnbpa {

// Base for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input document or process text.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// The system is not totally normed (unnormed constant or silent erasure).
class NormednessError : public Error {
 public:
  using Error::Error;
};

// A configured resource guard fired (closure size, state count, candidate count).
class GuardExceeded : public Error {
 public:
  using Error::Error;
};

// A structural invariant of the algorithm failed. Indicates a bug, never bad input.
class InternalError : public Error {
 public:
  using Error::Error;
};

inline void ensure(bool condition, const std::string& what) {
  if (!condition) throw InternalError(what);
}

}  // namespace tnbpa
