#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mixiso {

enum class ErrorKind {
  NotStochastic,
  Reducible,
  SingularStationary,
  StationaryMismatch,
  ZeroReferenceMass,
  EmptySet,
  FullSet,
  NotLazy,
  NotReversible,
  NoBoundaryEdge,
  TooBig,
  TooLarge,
  DomainError,
  BadParam,
  IterationCap,
  Parse,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotStochastic: return "NotStochastic";
    case ErrorKind::Reducible: return "Reducible";
    case ErrorKind::SingularStationary: return "SingularStationary";
    case ErrorKind::StationaryMismatch: return "StationaryMismatch";
    case ErrorKind::ZeroReferenceMass: return "ZeroReferenceMass";
    case ErrorKind::EmptySet: return "EmptySet";
    case ErrorKind::FullSet: return "FullSet";
    case ErrorKind::NotLazy: return "NotLazy";
    case ErrorKind::NotReversible: return "NotReversible";
    case ErrorKind::NoBoundaryEdge: return "NoBoundaryEdge";
    case ErrorKind::TooBig: return "TooBig";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::BadParam: return "BadParam";
    case ErrorKind::IterationCap: return "IterationCap";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

/// Every failure in the library is reported as an Error carrying its kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

namespace tol {
// Linear-algebra identities.
inline constexpr double kExact = 1e-12;
// Slack for inequalities, checked as lhs >= rhs - kSlack.
inline constexpr double kSlack = 1e-9;
// Closed-form identities between functionals.
inline constexpr double kIdentity = 1e-10;
}  // namespace tol

}  // namespace mixiso
