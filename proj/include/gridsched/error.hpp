#pragma once

#include <stdexcept>
#include <string>

namespace gridsched {

enum class ErrorKind {
  InvalidParameter,
  InfeasibleTrip,
  InvalidDispatch,
  WrongSolver,
  InvalidModel,
  BuildError,
  Infeasible,
  UndefinedMetric,
  InvalidState,
  LoadError,
};

const char* to_string(ErrorKind kind);

/// Base exception for every failure raised by the library. The kind is
/// stable and is what the command line tool reports in its error JSON.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::InfeasibleTrip: return "infeasible-trip";
    case ErrorKind::InvalidDispatch: return "invalid-dispatch";
    case ErrorKind::WrongSolver: return "wrong-solver";
    case ErrorKind::InvalidModel: return "invalid-model";
    case ErrorKind::BuildError: return "build-error";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::UndefinedMetric: return "undefined-metric";
    case ErrorKind::InvalidState: return "invalid-state";
    case ErrorKind::LoadError: return "load-error";
  }
  return "unknown";
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace gridsched
