#pragma once

#include <stdexcept>
#include <string>

namespace fastlim {

/// Root of every error the library raises. `category()` is a stable token
/// used by the command-line front end for machine-readable error records.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* category() const noexcept { return "Error"; }
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "InvalidArgument"; }
};

/// Base for failures of a numerical procedure (as opposed to bad input).
class NumericalFailure : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "NumericalFailure"; }
};

class NonFiniteValue : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
  const char* category() const noexcept override { return "NonFiniteValue"; }
};

class DivisionByVanishingDenominator : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
  const char* category() const noexcept override { return "DivisionByVanishingDenominator"; }
};

class NegativityBreach : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
  const char* category() const noexcept override { return "NegativityBreach"; }
};

class NonFiniteState : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
  const char* category() const noexcept override { return "NonFiniteState"; }
};

class NoInteriorEquilibrium : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
  const char* category() const noexcept override { return "NoInteriorEquilibrium"; }
};

class DegenerateDenominator : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
  const char* category() const noexcept override { return "DegenerateDenominator"; }
};

/// Configuration problems. All of these map to exit code 2 in the CLI.
class ConfigError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "ConfigError"; }
};

class ParseError : public ConfigError {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t offset)
      : ConfigError(what), line_(line), offset_(offset) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t offset() const noexcept { return offset_; }
  const char* category() const noexcept override { return "ParseError"; }

 private:
  std::size_t line_;
  std::size_t offset_;
};

class ValidationError : public ConfigError {
 public:
  ValidationError(const std::string& key, const std::string& what)
      : ConfigError(key + ": " + what), key_(key) {}
  const std::string& key() const noexcept { return key_; }
  const char* category() const noexcept override { return "ValidationError"; }

 private:
  std::string key_;
};

class MissingParameter : public ConfigError {
 public:
  explicit MissingParameter(const std::string& key)
      : ConfigError("missing parameter '" + key + "'"), key_(key) {}
  const std::string& key() const noexcept { return key_; }
  const char* category() const noexcept override { return "MissingParameter"; }

 private:
  std::string key_;
};

class IoError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "IoError"; }
};

}  // namespace fastlim
