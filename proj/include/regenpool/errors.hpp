#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace regenpool {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Structurally invalid domain object (dangling reference, broken invariant).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A model builder was handed inconsistent inputs.
class BuildError : public Error {
 public:
  using Error::Error;
};

// A solver assignment failed the invariants of the structure it should encode.
class ExtractionError : public Error {
 public:
  using Error::Error;
};

}  // namespace regenpool
