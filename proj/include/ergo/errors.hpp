#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ergo {

enum class ErrorKind {
  NonElliptic,
  UnknownProblem,
  BadGrid,
  NoConvergence,
  PerronViolation,
  NotConverged,
  BadBracket,
  Inconclusive,
  InsufficientMass,
  NonPositiveTest,
  ComplexRoots,
  NoStabilizing,
  SingularLinearSolve,
  EmptyFamily,
  NotErgodic,
  ConfigError,
  PreconditionViolation,
};

std::string_view to_string(ErrorKind kind);

/// Every failure the toolkit reports carries one of the kinds above so callers
/// (and the CLI exit-code mapping) can tell numerical findings from misuse.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ergo
