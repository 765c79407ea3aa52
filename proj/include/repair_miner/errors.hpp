#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace repair_miner {

/// Base of every error raised by the library. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
  ParseError(const std::string &what, std::size_t line, std::size_t column)
      : Error(what + " at line " + std::to_string(line) + ", column " +
              std::to_string(column)),
        line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

class UnsupportedConstruct : public ParseError {
public:
  UnsupportedConstruct(const std::string &construct, std::size_t line,
                       std::size_t column)
      : ParseError("unsupported construct '" + construct + "'", line, column) {}
};

/// Well-formed document whose records do not follow the expected schema.
class SchemaError : public Error {
public:
  using Error::Error;
};

class TaxonomyError : public Error {
public:
  using Error::Error;
};

class InvariantError : public Error {
public:
  using Error::Error;
};

class InconsistencyError : public Error {
public:
  using Error::Error;
};

class UnclassifiableChange : public Error {
public:
  using Error::Error;
};

class UnknownFeature : public Error {
public:
  using Error::Error;
};

class DimensionError : public Error {
public:
  using Error::Error;
};

class UnsupportedSize : public Error {
public:
  using Error::Error;
};

class DomainError : public Error {
public:
  using Error::Error;
};

class TrainingError : public Error {
public:
  using Error::Error;
};

class EmptyShape : public Error {
public:
  using Error::Error;
};

class NotMined : public Error {
public:
  using Error::Error;
};

class SplitError : public Error {
public:
  using Error::Error;
};

class EnvironmentError : public Error {
public:
  using Error::Error;
};

class NonterminatingOracle : public Error {
public:
  using Error::Error;
};

} // namespace repair_miner
