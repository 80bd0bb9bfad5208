#pragma once

#include <stdexcept>
#include <string>

namespace gridfreq {

enum class ErrorKind {
  ParseError,
  MissingRegion,
  NonContiguousHours,
  ValueOutOfRange,
  TargetUnreachable,
  ConfigMissingRegion,
  EmptyHorizon,
  Infeasible,
  NoSynchronousUnit,
  NonPositiveInput,
  UnbalancedSystem,
  SingularRegion,
  NonFiniteState,
  WindowTooLong,
  TraceTooShort,
  ZeroDispatch,
  NoViolations,
  ConfigMismatch,
  ConfigError,
  IoError,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::MissingRegion: return "MissingRegion";
    case ErrorKind::NonContiguousHours: return "NonContiguousHours";
    case ErrorKind::ValueOutOfRange: return "ValueOutOfRange";
    case ErrorKind::TargetUnreachable: return "TargetUnreachable";
    case ErrorKind::ConfigMissingRegion: return "ConfigMissingRegion";
    case ErrorKind::EmptyHorizon: return "EmptyHorizon";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::NoSynchronousUnit: return "NoSynchronousUnit";
    case ErrorKind::NonPositiveInput: return "NonPositiveInput";
    case ErrorKind::UnbalancedSystem: return "UnbalancedSystem";
    case ErrorKind::SingularRegion: return "SingularRegion";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::WindowTooLong: return "WindowTooLong";
    case ErrorKind::TraceTooShort: return "TraceTooShort";
    case ErrorKind::ZeroDispatch: return "ZeroDispatch";
    case ErrorKind::NoViolations: return "NoViolations";
    case ErrorKind::ConfigMismatch: return "ConfigMismatch";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "UnknownError";
}

/// Domain error carrying a machine-checkable kind plus a human message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(std::string(to_string(kind)) + ": " + msg), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

}  // namespace gridfreq
