#pragma once

#include <stdexcept>
#include <string>

namespace flore {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid distribution / algorithm parameter.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Malformed trace record. Carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

/// Vector or matrix dimensions do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or an unguarded division by zero.
class NumericError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Requested operation is not supported for this configuration
/// (size guard exceeded, conditioning disabled, ...).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Sketch has no mass, so a quantity derived from it is undefined.
class EmptySketchError : public Error {
 public:
  using Error::Error;
};

/// A 32-bit counter would overflow.
class SaturationError : public Error {
 public:
  using Error::Error;
};

/// Serialized file is truncated or damaged.
class CorruptionError : public Error {
 public:
  using Error::Error;
};

/// Serialized file is intact but was written for a different
/// version or architecture.
class IncompatibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace flore
