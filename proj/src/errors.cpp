#include "ergo/errors.hpp"

namespace ergo {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonElliptic: return "NonElliptic";
    case ErrorKind::UnknownProblem: return "UnknownProblem";
    case ErrorKind::BadGrid: return "BadGrid";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::PerronViolation: return "PerronViolation";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::BadBracket: return "BadBracket";
    case ErrorKind::Inconclusive: return "Inconclusive";
    case ErrorKind::InsufficientMass: return "InsufficientMass";
    case ErrorKind::NonPositiveTest: return "NonPositiveTest";
    case ErrorKind::ComplexRoots: return "ComplexRoots";
    case ErrorKind::NoStabilizing: return "NoStabilizing";
    case ErrorKind::SingularLinearSolve: return "SingularLinearSolve";
    case ErrorKind::EmptyFamily: return "EmptyFamily";
    case ErrorKind::NotErgodic: return "NotErgodic";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::PreconditionViolation: return "PreconditionViolation";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace ergo
