#pragma once

#include <stdexcept>
#include <string>

namespace icn {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A column, parameter, or feature is missing or inconsistent with a schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text. Carries the 1-based data row when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row)
      : Error(what + " (row " + std::to_string(row) + ")"), row_(row) {}
  [[nodiscard]] std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Training data has a single class or no usable variation.
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

class EventNotFoundError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace icn
