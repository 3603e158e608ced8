#pragma once

#include <stdexcept>
#include <string>

namespace egotext {

// Failure classes map one-to-one onto CLI exit codes.
enum class ErrorKind {
  kConfig = 1,             // usage, config or schema problem in user input
  kData = 2,               // unreadable or malformed data
  kEngineUnavailable = 3,  // requested engine cannot be constructed
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::kConfig, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::kData, what) {}
};

class EngineUnavailable : public Error {
 public:
  explicit EngineUnavailable(const std::string& what)
      : Error(ErrorKind::kEngineUnavailable, what) {}
};

}  // namespace egotext
