#pragma once

#include <stdexcept>
#include <string>

namespace scdmi {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A core, primitive or transform description violates its structural rules.
class InvalidSpec : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// The integration domain (mask) has no pixels.
class EmptyDomain : public Error {
 public:
  using Error::Error;
};

// The image cannot hold the 5-point derivative stencil.
class TooSmall : public Error {
 public:
  using Error::Error;
};

// Brute-force enumeration would exceed its tuple budget.
class TooLarge : public Error {
 public:
  using Error::Error;
};

class Singular : public Error {
 public:
  using Error::Error;
};

// The color normalization term vanished; the invariant is undefined.
class Degenerate : public Error {
 public:
  using Error::Error;
};

class InternalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace scdmi
