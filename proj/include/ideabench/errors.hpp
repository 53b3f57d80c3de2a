#pragma once

#include <stdexcept>
#include <string>

namespace ideabench {

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input data (bad JSON line, bad CSV header, unparseable completion).
class ParseError : public Error {
public:
  using Error::Error;
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what) {}
};

// Well-formed data that violates a domain invariant.
class ValidationError : public Error {
public:
  using Error::Error;
};

// Arguments outside an operation's domain.
class DomainError : public Error {
public:
  using Error::Error;
};

// Bad or missing configuration (paths, keys, env vars).
class ConfigError : public Error {
public:
  using Error::Error;
};

// HTTP transport failure after retries.
class TransportError : public Error {
public:
  TransportError(int status, const std::string& what) : Error(what), status_(status) {}
  int status() const { return status_; }

private:
  int status_ = 0;
};

// Provider returned data inconsistent with the request (wrong count, wrong dim).
class IntegrityError : public Error {
public:
  using Error::Error;
};

// Numerical routine failed to converge.
class NumericError : public Error {
public:
  using Error::Error;
};

}  // namespace ideabench
