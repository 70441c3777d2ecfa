#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace absaug {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntactically malformed input (XML, JSON, JSONL). Line and offset are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t offset = 0)
      : Error(message), line_(line), offset_(offset) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t line_;
  std::size_t offset_;
};

/// Well-formed input whose content violates a data contract.
class DataError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Failure talking to a generation backend.
class GatewayError : public Error {
 public:
  GatewayError(const std::string& message, std::string backend_id,
               std::optional<int> status = std::nullopt, bool retryable = false)
      : Error(message),
        backend_id_(std::move(backend_id)),
        status_(status),
        retryable_(retryable) {}

  const std::string& backend_id() const noexcept { return backend_id_; }
  std::optional<int> status() const noexcept { return status_; }
  bool retryable() const noexcept { return retryable_; }

 private:
  std::string backend_id_;
  std::optional<int> status_;
  bool retryable_;
};

}  // namespace absaug
