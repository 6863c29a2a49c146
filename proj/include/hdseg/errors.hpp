#ifndef HDSEG_ERRORS_HPP
#define HDSEG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hdseg {

/// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration values or unusable inputs (empty datasets, bad ratios).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed data files (truncated scans, bad magic, non-finite payloads).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A caller violated an operation's precondition (dimension mismatch,
/// out-of-range label, update outside the active buffer).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Operation invalid in the object's current state (classify on an untrained
/// model, select on an uninitialized loss store).
class StateError : public Error {
 public:
  using Error::Error;
};

}  // namespace hdseg

#endif  // HDSEG_ERRORS_HPP
