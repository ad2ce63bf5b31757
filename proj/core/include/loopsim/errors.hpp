#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace loopsim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration value or combination of values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A synthetic-generator spec that cannot be realised (e.g. the core
/// constraint cannot hold with the requested sizes).
class InfeasibleSpecError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Input data could not be read or does not satisfy the dataset contract.
class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class EmptyDatasetError : public DataError {
 public:
  EmptyDatasetError() : DataError("dataset is empty after filtering") {}
};

/// A precondition of an operation was not met by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// A metric is undefined for the given input (empty item list, zero baseline).
class UndefinedMetricError : public ContractError {
 public:
  using ContractError::ContractError;
};

/// Internal consistency check failed; indicates a bug upstream.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class UnknownUserError : public ContractError {
 public:
  using ContractError::ContractError;
};

class NoAcceptableItemError : public Error {
 public:
  NoAcceptableItemError() : Error("no acceptable item: recommendation list is empty") {}
};

class TrainingDivergedError : public Error {
 public:
  explicit TrainingDivergedError(int epoch)
      : Error("training diverged (non-finite loss) at epoch " + std::to_string(epoch)),
        epoch_(epoch) {}

  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

}  // namespace loopsim
