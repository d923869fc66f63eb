#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tir {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. `line()` is 1-based; 0 when the error is not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Invalid configuration or violated precondition on user-supplied input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A caller broke an operation's documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class BackendError : public Error {
 public:
  using Error::Error;
};

/// Connection-level failure that survived every retry.
class TransportError : public BackendError {
 public:
  using BackendError::BackendError;
};

/// The server answered with a non-success status (or an unusable body).
class ProtocolError : public BackendError {
 public:
  ProtocolError(int status, const std::string& server_message)
      : BackendError("backend returned status " + std::to_string(status) + ": " + server_message),
        status_(status),
        server_message_(server_message) {}
  int status() const noexcept { return status_; }
  const std::string& server_message() const noexcept { return server_message_; }

 private:
  int status_;
  std::string server_message_;
};

/// The scripted mock could not answer a request (no rule, or more than one).
class MockScriptError : public BackendError {
 public:
  using BackendError::BackendError;
};

}  // namespace tir
