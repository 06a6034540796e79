#pragma once

#include <stdexcept>
#include <string>

namespace mmrag {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Missing or inconsistent configuration. The CLI maps this to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A caller violated a documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Input data does not match its schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Undecodable or malformed binary payload (images, base64).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A remote service answered with something that breaks its contract.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// Network failure or non-success HTTP status. `status` is 0 when no response arrived.
class TransportError : public Error {
 public:
  TransportError(const std::string& what, int status) : Error(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

class AuthError : public TransportError {
 public:
  using TransportError::TransportError;
};

/// Degenerate statistical input (zero variance, empty sample, ...).
class StatsError : public Error {
 public:
  using Error::Error;
};

}  // namespace mmrag
