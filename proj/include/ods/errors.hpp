#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ods {

// Process exit codes used by the CLI. Each failure family gets its own code.
enum class ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kParse = 2,
  kValidation = 3,
  kIntegrator = 4,
  kIo = 5,
  kRefused = 6,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const noexcept { return ExitCode::kValidation; }
};

/// Bad argument to a library call (index out of range, unnormalized state, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A state that should be physical is not (negative overlap, ...).
class NumericalStateError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kIntegrator; }
};

/// Drive violates the dark-state conditions required by the requested operation.
class NotOdsError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kRefused; }
};

/// delta == 0: the dark state does not rotate, so no retrieval time exists.
class NoOscillationError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kRefused; }
};

class IntegratorError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kIntegrator; }
};

class DivergenceError : public IntegratorError {
 public:
  using IntegratorError::IntegratorError;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }
  ExitCode exit_code() const noexcept override { return ExitCode::kParse; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Command invoked without something it needs (e.g. plan without a target).
class UsageError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kUsage; }
};

class IoError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kIo; }
};

}  // namespace ods
