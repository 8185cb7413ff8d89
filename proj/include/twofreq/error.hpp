#pragma once

#include <stdexcept>
#include <string>

namespace twofreq {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A required input column is absent. `column()` names it.
class SchemaError : public Error {
 public:
  explicit SchemaError(std::string column)
      : Error("missing required column '" + column + "'"), column_(std::move(column)) {}
  const std::string& column() const { return column_; }

 private:
  std::string column_;
};

/// A single input record could not be parsed.
class RowError : public Error {
 public:
  RowError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Content-level problems: duplicates, empty partitions, coverage gaps.
class DataError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace twofreq
