#pragma once

#include <stdexcept>
#include <string>

namespace fbpstream {

enum class ErrorKind {
  configuration,
  data,
  argument,
  query,
  inconsistency,
};

// Base of every error raised by the library. The kind decides the CLI exit
// code (see exit_code()).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::configuration, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error(ErrorKind::argument, what) {}
};

class QueryError : public Error {
 public:
  explicit QueryError(const std::string& what) : Error(ErrorKind::query, what) {}
};

class InconsistencyError : public Error {
 public:
  explicit InconsistencyError(const std::string& what) : Error(ErrorKind::inconsistency, what) {}
};

// 2 configuration/argument, 3 data, 4 query/inconsistency.
inline int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::configuration:
    case ErrorKind::argument:
      return 2;
    case ErrorKind::data:
      return 3;
    case ErrorKind::query:
    case ErrorKind::inconsistency:
      return 4;
  }
  return 1;
}

}  // namespace fbpstream
